import enum


class G2Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    MOMENT_PIPELINE = "moment_pipeline"
    ESTIMATED = "estimated"
    ORACLE = "oracle"


class ThresholdMethod(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    ROOT_FINDING = "root_finding"


class ReconstructionStatus(str, enum.Enum):
    OK = "ok"
    UNPHYSICAL = "unphysical"
    UNDEFINED = "undefined"


class TruncationStatus(str, enum.Enum):
    OK = "ok"
    WARNING = "warning"


class ScanMode(str, enum.Enum):
    SINGLE = "single"
    TWO_MODE = "two_mode"


class ScanParameter(str, enum.Enum):
    ALPHA = "alpha"
    BETA = "beta"
    R = "r"
    PSI = "psi"
    N_TH = "n_th"
    N_TH1 = "n_th1"
    N_TH2 = "n_th2"
