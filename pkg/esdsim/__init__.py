from .channels import ChannelKind, KrausChannel, apply_local, evolve_werner_analytic, p_of_t
from .entanglement import concurrence_eig, concurrence_x
from .esd import CriticalResult, CriticalStatus, pc_analytic, pc_numeric
from .states import DensityMatrix, WernerLikeParams, XElements, bell_like, extract_x, werner_like

__all__ = [
	"ChannelKind",
	"KrausChannel",
	"apply_local",
	"evolve_werner_analytic",
	"p_of_t",
	"concurrence_eig",
	"concurrence_x",
	"CriticalResult",
	"CriticalStatus",
	"pc_analytic",
	"pc_numeric",
	"DensityMatrix",
	"WernerLikeParams",
	"XElements",
	"bell_like",
	"extract_x",
	"werner_like",
]
