"""Exception hierarchy.

Every compile-time error can carry the coordinates of the offending cell so
the CLI can point the modeller at a table, row and column.
"""

from __future__ import annotations


class CdmnError(Exception):
    """Base class of all errors raised by the package."""

    def __init__(self, message: str, *, table: str | None = None,
                 row: int | None = None, column: int | None = None):
        super().__init__(message)
        self.message = message
        self.table = table
        self.row = row
        self.column = column

    def locate(self, table=None, row=None, column=None):
        """Fill in coordinates that are still unknown; returns self."""
        if self.table is None:
            self.table = table
        if self.row is None:
            self.row = row
        if self.column is None:
            self.column = column
        return self

    def __str__(self):
        where = []
        if self.table is not None:
            where.append(f"table {self.table!r}")
        if self.row is not None:
            where.append(f"row {self.row}")
        if self.column is not None:
            where.append(f"column {self.column}")
        if where:
            return f"{', '.join(where)}: {self.message}"
        return self.message


# grid ingestion
class GridError(CdmnError):
    pass


class InvalidEncoding(GridError):
    pass


class UnbalancedQuote(GridError):
    pass


class EmptyModel(GridError):
    pass


class UnknownHitPolicy(GridError):
    pass


class AmbiguousTitle(GridError):
    pass


class MalformedTable(GridError):
    pass


class BlankColumn(MalformedTable):
    pass


class MissingSeparator(MalformedTable):
    pass


# glossary
class GlossaryError(CdmnError):
    pass


class MissingTypeTable(GlossaryError):
    pass


class DuplicateGlossaryTable(GlossaryError):
    pass


class UnknownType(GlossaryError):
    pass


class NoArguments(GlossaryError):
    pass


class DuplicateSymbol(GlossaryError):
    pass


class ClashingDomainElement(GlossaryError):
    pass


class UnresolvedSymbol(GlossaryError):
    pass


class AmbiguousMatch(GlossaryError):
    pass


# expressions
class ExpressionError(CdmnError):
    pass


class MalformedExpression(ExpressionError):
    pass


class MalformedRange(MalformedExpression):
    pass


class UnknownHeaderSymbol(ExpressionError, UnresolvedSymbol):
    pass


class UnboundVariable(ExpressionError):
    pass


class ArityMismatch(ExpressionError):
    pass


class TypeMismatch(ExpressionError):
    pass


class VariableRedeclaration(ExpressionError):
    pass


class YesNoOnTerm(ExpressionError):
    pass


# evaluation
class EvaluationError(CdmnError):
    pass


class DivisionByZero(EvaluationError):
    pass


class InexactDivision(EvaluationError):
    pass


class MinMaxOfEmptySet(EvaluationError):
    pass


class UninterpretedSymbol(EvaluationError):
    pass


# translation
class TranslationError(CdmnError):
    pass


class NonValueOutput(TranslationError):
    pass


class UnboundOutputVariable(TranslationError):
    pass


class DefaultNotAllowed(TranslationError):
    pass


class DefaultOnConstraintTable(DefaultNotAllowed):
    pass


class MultipleOutputs(TranslationError):
    pass


class NonNumericOutput(TranslationError):
    pass


class NonNumericCountTarget(TranslationError):
    pass


class NonBasicValue(TranslationError):
    pass


class IncompleteFunctionData(TranslationError):
    pass


class ConflictingData(TranslationError):
    pass


class UnknownDomainElement(TranslationError):
    pass


class DataDecisionOverlap(TranslationError):
    pass


class MultipleGoalTables(TranslationError):
    pass


class MalformedGoal(TranslationError):
    pass


class EmptyDomain(TranslationError):
    pass


# solving
class SolveError(CdmnError):
    pass


class DomainBlowup(SolveError):
    pass


class ResourceLimit(SolveError):
    pass


class OracleBlowup(SolveError):
    pass
