import sys
from pathlib import Path

# Oracle and generator helpers live next to the tests.
sys.path.insert(0, str(Path(__file__).parent))
