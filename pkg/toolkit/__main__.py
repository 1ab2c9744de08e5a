import sys

from .cli import dispatch

sys.exit(dispatch())
