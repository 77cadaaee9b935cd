class BwlabError(Exception):
    """Base class for every error raised by bwlab """
    exit_code = 1


class HexParseError(BwlabError):
    """This exception is raised when a word or involution descriptor cannot be parsed """


class NotACodewordError(BwlabError):
    """This exception is raised when a Boolean word has algebraic degree above 2 """
    exit_code = 2

    def __init__(self, message: str, degree: int):
        super().__init__(message)
        self.degree = degree


class NotAlternatingError(BwlabError):
    """Error raised when a form expected to be alternating is not (nonzero diagonal or asymmetric) """
    exit_code = 2


class InvalidInvolutionError(BwlabError):
    """Error raised when an involution does not satisfy the requirements of the called routine """
    exit_code = 2


class NotNormalizingError(BwlabError):
    """Error raised when a monomial map does not normalize the lower group """
    exit_code = 2


class NotSublatticeError(BwlabError):
    """Error raised when a lattice is not contained in the lattice it is compared with """
    exit_code = 2


class LatticeNotPreservedError(BwlabError):
    """Error raised when a map does not send a lattice onto itself """
    exit_code = 2


class VerificationError(BwlabError):
    """Error raised when a computed structure contradicts the property it was checked against """
    exit_code = 3


class ResourceGuardError(BwlabError):
    """Error raised when an enumeration exceeds the configured ceilings """
    exit_code = 4


class CategoryError(BwlabError):
    """Error raised when a word does not belong to the orbit category an operation requires """
    exit_code = 2
