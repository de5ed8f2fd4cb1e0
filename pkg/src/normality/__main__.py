import sys

from normality.cli import main

sys.exit(main())
