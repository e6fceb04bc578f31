"""Module entry point: ``python -m cfx`` behaves like the ``cfx`` script."""

import sys

from .cli import main

sys.exit(main())
