import sys

from chatelet.cli import main

sys.exit(main())
