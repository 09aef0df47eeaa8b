import sys

from betavote.cli import main

sys.exit(main())
