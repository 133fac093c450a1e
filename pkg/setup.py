"""Packaging files and information."""


from setuptools import setup

from rfidwsn import __version__ as version


setup(

    # Basic package information:
    name = 'rfidwsn',
    version = version,
    packages = ['rfidwsn'],

    # Packaging options:
    zip_safe = False,
    include_package_data = True,

    # Package dependencies:
    python_requires = '>=3.7',
    install_requires = ['simpy>=4.0', 'texttable>=1.6'],
    extras_require = {
        'tests': ['pytest>=6.0', 'hypothesis>=6.0'],
    },
    entry_points = {
        'console_scripts': ['rfidwsn = rfidwsn.cli:main'],
    },

    # Metadata for PyPI:
    license = 'Python Software Foundation License / UNLICENSE',
    keywords = 'python rfid sm130 mifare i2c wsn sensor network access control simulation',
    description = 'An RFID reader on a wireless sensor network, in simulation',
    long_description = open('README.rst').read(),

    # Classifiers:
    platforms = 'Any',
    classifiers = [
        'Development Status :: 4 - Beta',
        'Environment :: Console',
        'Intended Audience :: Developers',
        'Intended Audience :: Science/Research',
        'Operating System :: POSIX',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering',
        'Topic :: System :: Networking',
        'Topic :: Software Development :: Libraries :: Python Modules'
    ],

)
