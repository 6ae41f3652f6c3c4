import os


class RobustnessError(Exception):
    """Base class for every error raised by the toolkit"""


class InvalidParameter(RobustnessError, ValueError):
    """Constructor argument outside its documented range"""


class QueryOutsideSupport(RobustnessError):
    """eta is undefined at the queried point"""


class EmptySupportSet(RobustnessError):
    """Distance requested to an empty union of supports"""


class KappaOutOfRange(RobustnessError):
    """kappa must lie in (0, 1]"""


class UnboundedRegion(RobustnessError):
    """Boundedness of the robustness region could not be certified"""


class EmptyDataset(RobustnessError):
    """Classifier fitted to zero samples"""


class KTooLarge(RobustnessError):
    """k_n exceeds the number of samples"""


class NTooSmall(RobustnessError):
    """Schedule evaluated at a sample size it is not defined for"""


class TooLarge(RobustnessError):
    """Brute-force enumeration requested beyond its guard"""


class EmptySeries(RobustnessError):
    """Plot requested without any series"""


class ConfigError(RobustnessError):
    def __init__(self, message, line=None, field=None):
        """
        :param message: what is wrong with the config
        :param line: 1-based line number in the config file, if known
        :param field: config key the error refers to, if known
        """
        self.line = line
        self.field = field
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        prefix = f"[{', '.join(location)}] " if location else ""
        super().__init__(f"{prefix}{message}")


def error_message_detail(error, error_detail):
    _, _, exc_tb = error_detail.exc_info()
    while exc_tb is not None and exc_tb.tb_next is not None:
        exc_tb = exc_tb.tb_next
    if exc_tb is None:
        return f"Error occurred error message [{error}]"
    file_name = os.path.split(exc_tb.tb_frame.f_code.co_filename)[1]
    error_message = "Error occurred python script name [{0}] line number [{1}] error message [{2}]".format(
        file_name, exc_tb.tb_lineno, str(error)
    )

    return error_message


class CustomException(Exception):
    def __init__(self, error_message, error_detail):
        """
        :param error_message: error message in string format
        :param error_detail: the sys module, used to read the active traceback
        """
        super().__init__(error_message)
        self.error_message = error_message_detail(
            error_message, error_detail=error_detail
        )

    def __str__(self):
        return self.error_message
