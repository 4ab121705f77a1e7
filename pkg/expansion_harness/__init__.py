from .domain_expansion import (
    ExpansionReport,
    TailUniformity,
    DomainExpansionHarness,
    tail_uniformity,
)

__all__ = ["ExpansionReport", "TailUniformity", "DomainExpansionHarness", "tail_uniformity"]
