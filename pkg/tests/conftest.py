import sys
import os

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
PROJECT = os.path.join(ROOT, "NetworkIdentifiability")
if PROJECT not in sys.path:
    sys.path.insert(0, PROJECT)
