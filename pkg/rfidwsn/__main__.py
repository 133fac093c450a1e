import sys

from rfidwsn.cli import main

sys.exit(main())
