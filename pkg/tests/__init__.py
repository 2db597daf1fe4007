"""towerkit test suite."""
