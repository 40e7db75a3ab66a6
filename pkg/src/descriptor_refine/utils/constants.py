"""Constants used across the DescriptorRefine toolkit."""

# CLI exit codes
EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

# Initial-set kinds as written in system files
INIT_FULL = "full"
INIT_SUBSPACE = "subspace"
INIT_BOX = "box"
INIT_POINTS = "points"

# Refinement pipeline stages
STAGE_INTERFACE = "interface"
STAGE_ABSTRACT = "abstract"
STAGE_LIFT = "lift"

# Well-posedness conditions
CONDITION_EXISTENCE = "existence"
CONDITION_UNIQUENESS = "uniqueness"

DRIVE_LOW = -1.0
DRIVE_HIGH = 1.0
