# -*- coding: utf-8 -*-
#
# rfidwsn documentation build configuration file.
#
# Only the settings that differ from the sphinx-quickstart defaults are kept.

import sys
import os

# The package is documented from the checkout, not from an installed copy.
sys.path.insert(0, os.path.abspath('../../'))

from rfidwsn import __version__

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.todo',
    'sphinx.ext.viewcode',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'rfidwsn'
copyright = u'2016, the rfidwsn developers'
author = u'the rfidwsn developers'

# The short X.Y version and the full version.
version = '.'.join(__version__.split('.')[:2])
release = __version__

exclude_patterns = []
pygments_style = 'sphinx'
todo_include_todos = True

# -- Options for HTML output ----------------------------------------------

html_theme = 'alabaster'
html_static_path = ['_static']
htmlhelp_basename = 'rfidwsndoc'

# -- Options for LaTeX, manual page and Texinfo output --------------------

latex_documents = [
    (master_doc, 'rfidwsn.tex', u'rfidwsn Documentation',
     u'the rfidwsn developers', 'manual'),
]

man_pages = [
    (master_doc, 'rfidwsn', u'rfidwsn Documentation',
     [author], 1)
]

texinfo_documents = [
    (master_doc, 'rfidwsn', u'rfidwsn Documentation',
     author, 'rfidwsn', 'An RFID reader on a wireless sensor network, in simulation.',
     'Miscellaneous'),
]

intersphinx_mapping = {'python': ('https://docs.python.org/3', None)}
