"""Web service substitution matchmaker.

Discovers the candidate most similar to a failing service, classifies the
relation between every operation pair, and emits SAWSDL-annotated WSDL pairs
encoding an administrator-confirmed substitution plan.
"""

__version__ = "0.1.0"
