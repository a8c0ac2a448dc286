"""Built-in mixture models and the model registry used by the command line."""
from typing import Callable, Dict

from mixqmc.exceptions import DomainError
from mixqmc.models.base import MixtureModel
from mixqmc.models.flood import flood_model
from mixqmc.models.integrands import INTEGRANDS, get_integrand
from mixqmc.models.toy import toy_model
from mixqmc.services.mixture_service import load_mixture_spec, quadrature_reference

MODELS: Dict[str, Callable[[], MixtureModel]] = {
    "toy": toy_model,
    "flood": flood_model,
}


def model_from_file(path: str) -> MixtureModel:
    """Mixture file with a registered integrand; one-dimensional files get a quadrature reference."""
    spec = load_mixture_spec(path)
    if spec.integrand is None:
        raise DomainError(f"mixture file {path} does not name an integrand")
    integrand = get_integrand(spec.integrand)
    reference = (lambda: quadrature_reference(spec, integrand)) if spec.dimension == 1 else None
    return MixtureModel(name=spec.name, spec=spec, integrand=integrand, reference=reference)


def get_model(name: str) -> MixtureModel:
    """toy, flood, or file:<path>."""
    if name.startswith("file:"):
        return model_from_file(name[len("file:"):])
    try:
        return MODELS[name]()
    except KeyError:
        raise DomainError(f"unknown model {name!r}; choose from {sorted(MODELS)} or file:<path>")


__all__ = ["MixtureModel", "MODELS", "INTEGRANDS", "get_model", "get_integrand", "model_from_file"]
