"""
Affinity Network Simulator
Agent-based model of social networks driven by perceived affinity
"""

import sys

from affinity_sim.cli import main

if __name__ == "__main__":
    sys.exit(main())
