import sys

from asgo.bench.cli import main

sys.exit(main())
