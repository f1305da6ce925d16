import sys

from horolab.cli import main

sys.exit(main())
