import sys

from svfie.cli import main

sys.exit(main())
