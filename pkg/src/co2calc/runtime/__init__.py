"""The CO2 calculus: syntax, structural congruence, reduction, traces and honesty."""
from .congruence import Config, Normaliser, fresh_session, normalise
from .reduction import AgreementWitness, Reducer, Step, agreement_search
from .syntax import (
    NIL, Agent, Ask, Call, Choice, Definition, Do, Fuse, Latent, PDelim, PPar, SDelim,
    Session, SPar, Tau, Tell, delim, seq,
)
