"""Exception types shared across the library.

The command line driver maps these onto exit codes, so library code
should raise the most specific one that applies:

* ParseError        -> exit 1 (bad input files, bad schema)
* PreconditionError -> exit 2 (mathematical precondition violated)
* PrecisionError    -> exit 3 (capped precision exhausted, or a result
                       that cannot be distinguished from a degenerate
                       case at the working precision)
"""


class ParseError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


class PrecisionError(ArithmeticError):
    pass
