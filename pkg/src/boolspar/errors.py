class InvariantError(AssertionError):
    """A property that holds with probability 1 was violated: an implementation bug."""
