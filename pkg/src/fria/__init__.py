"""fria: a gate-based fundamental rights impact assessment engine for AI systems.

The pipeline runs in four stages. Phase 0 captures the system overview and
its drivers; Phase 1 scores a driver-filtered rights checklist per guiding
criterion; Phase 2 evaluates impact scenarios for the criteria that advanced;
the output stage partitions scenarios, tracks remediation coverage, and
assembles the report. Records are revisioned, every mutation is audited.
"""

__version__ = "0.1.0"
