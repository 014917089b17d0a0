"""Survey equipment store suite.

Core package behind the HTTP service and CLI: angle/unit handling,
coordinate geometry and field computations, the beacon registry, the
instrument lending ledger, the instrument catalog, and the durable
document store with backup.
"""

__version__ = "0.1.0"
