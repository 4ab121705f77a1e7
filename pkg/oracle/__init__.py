from .linear_oracle import LinearOracle, ModeComparison, oracle_compare, oracle_stationary_variance

__all__ = ["LinearOracle", "ModeComparison", "oracle_compare", "oracle_stationary_variance"]
