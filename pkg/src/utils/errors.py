class WaringError(Exception):
    """Базовая ошибка библиотеки."""


# ---------------------------------------------------------
# region field
# ---------------------------------------------------------
class FieldError(WaringError):
    pass


class NonPrimeError(FieldError):
    pass


class EvenCharacteristicError(FieldError):
    pass


class BadDegreeError(FieldError):
    pass


class FieldTooLargeError(FieldError):
    pass


class FieldMismatchError(FieldError):
    """Элементы разных полей не смешиваются."""


class DivideByZeroError(FieldError, ZeroDivisionError):
    pass


# endregion
# ---------------------------------------------------------


# ---------------------------------------------------------
# region geometry
# ---------------------------------------------------------
class GeometryError(WaringError):
    pass


class DimensionTooSmallError(GeometryError):
    pass


class ZeroFirstColumnError(GeometryError):
    pass


class DegenerateTriangleError(GeometryError):
    pass


# endregion
# ---------------------------------------------------------


# ---------------------------------------------------------
# region orthogonal
# ---------------------------------------------------------
class OrthogonalError(WaringError):
    pass


class IsotropicMirrorError(OrthogonalError):
    pass


class LengthMismatchError(OrthogonalError):
    pass


class ZeroVectorError(OrthogonalError):
    pass


# endregion
# ---------------------------------------------------------


class UnrealizableInvariantError(WaringError):
    pass


class AmbientTooLargeError(WaringError):
    pass


class UsageError(WaringError):
    """Ошибка аргументов командной строки; flag — проблемный флаг."""

    def __init__(self, flag: str, message: str):
        self.flag = flag
        super().__init__(f"{flag}: {message}")
