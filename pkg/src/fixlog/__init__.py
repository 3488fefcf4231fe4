"""A Datalog interpreter where logical formulae are first-class terms.

Programs combine algebraic data types, pure functions, and relations; rules
may call functions, unify structured terms, and ask an SMT backend whether a
formula is satisfiable.  Evaluation is bottom-up, stratified, and parallel.
"""

__version__ = "0.1.0"
