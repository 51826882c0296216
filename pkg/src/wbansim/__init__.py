"""wbansim: multi-hop broadcast simulation for 7-node wireless body area networks."""

__version__ = "0.1.0"
