"""Shared error taxonomy.

Every domain error carries a stable machine-readable ``code`` (the class
name) so the HTTP layer can map it onto a status without string matching.
"""

from __future__ import annotations


class KgcfError(Exception):
    """Base class; ``code`` doubles as the wire-level error code."""

    @property
    def code(self) -> str:
        return type(self).__name__


# --- graph store ---

class EmptyLabel(KgcfError):
    pass


class InvalidKind(KgcfError):
    pass


class DanglingReference(KgcfError):
    pass


class ConfidenceOutOfRange(KgcfError):
    pass


class UnknownTriple(KgcfError):
    pass


class UnknownEntity(KgcfError):
    pass


class IllegalTransition(KgcfError):
    pass


class UnknownTarget(KgcfError):
    pass


class EntityInUse(KgcfError):
    pass


class ParseError(KgcfError):
    """Malformed persistence stream; ``line`` is 1-based."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


# --- crowd engine ---

class Unauthorized(KgcfError):
    pass


class AlreadyInGroup(KgcfError):
    pass


class UnknownGroup(KgcfError):
    pass


class UnknownUser(KgcfError):
    pass


class UnknownTask(KgcfError):
    pass


class NoEligibleGroups(KgcfError):
    pass


class NotAssignee(KgcfError):
    pass


class WrongPayloadKind(KgcfError):
    pass


class WrongState(KgcfError):
    pass


# --- captcha ---

class EmptyStore(KgcfError):
    pass


class ChallengeClosed(KgcfError):
    pass


class EmptyAnswer(KgcfError):
    pass


class InvalidAnswer(KgcfError):
    pass


class UnknownChallenge(KgcfError):
    pass


# --- consensus ---

class LedgerNotCollecting(KgcfError):
    pass


class EmptyLedger(KgcfError):
    pass


class SameAnswer(KgcfError):
    pass


class TooFewVotes(KgcfError):
    pass


class NotInAmbiguityVote(KgcfError):
    pass


class SlotAlreadyFilled(KgcfError):
    pass


class UnknownLedger(KgcfError):
    pass


# --- analytics / recommend ---

class UnknownStudent(KgcfError):
    pass


class UnknownCourse(KgcfError):
    pass


class NoRoute(KgcfError):
    pass


class NoResources(KgcfError):
    pass


class UnstartedTopic(KgcfError):
    pass


class InvalidRecord(KgcfError):
    pass


# --- simulation / service ---

class InvalidConfig(KgcfError):
    pass


class ChallengePending(KgcfError):
    pass


class Unauthenticated(KgcfError):
    pass
