import sys

from greenlink.cli import main

sys.exit(main())
