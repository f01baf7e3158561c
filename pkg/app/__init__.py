__version__ = "1.0.0"

# Bumped whenever the layout of a JSON document written by the CLI changes.
SCHEMA_VERSIONS = {
    "mixture": 1,
    "fit": 1,
    "test": 1,
    "evaluation": 1,
    "manifest": 1,
}
