"""Directional quantile envelopes of bivariate samples.

An envelope at level ``p`` intersects, over a set of unit directions
``s``, the halfplanes ``{x : s.x >= Q(p, s)}`` where ``Q(p, s)`` is the
``p``-quantile of the projected sample. With empirical quantiles over the
critical directions the envelopes are exactly the halfspace depth regions.
"""
from .depth import (DepthValue, depth_counts, depth_region_oracle,
                    depth_regions_oracle, halfspace_depth, max_hyperplane_mass,
                    max_line_count, tangent_count, tangent_mass, tukey_median)
from .envelope import (DirectionSet, Envelope, biplot_curve, build_envelope,
                       build_envelopes, coverage_search, critical_directions,
                       enclosed_count, rank_envelope, uniform_directions)
from .errors import (ConfigError, DataError, DegenerateCovariate,
                     DegenerateRegion, DegenerateTail, EmptyFile, EmptyRegion,
                     EmptySample, ExtrapolationRefused, InvalidP,
                     MissingColumn, NoEnvelope, NonFiniteValue,
                     NonNumericCell, OutOfRegime, QtomoError,
                     SingularCovariance, TooFewDirections, TooFewExceedances,
                     UnboundedRegion)
from .estimators import (DirectionalQuantileEstimator, EmpiricalEstimator,
                         ExtremeEstimator, LinearQRFit,
                         QuantileRegressionEstimator, TailModel,
                         conditional_envelope, empirical_estimator,
                         extreme_estimator, fit_gpd_tail, gpd_quantile,
                         linear_qr, pinball_loss)
from .geom import (ConvexRegion, Halfplane, RegionKind, UnitDirection,
                   convex_hull, distance_to_region, hausdorff_distance,
                   intersect_halfplanes, intersect_normals, kappa,
                   polyline_self_intersects, support_function)
from .normalfit import (EnclosedMass, IndexingMode, NormalFit, TangentMass,
                        fit_normal, inverse_normal_cdf, normal_cdf,
                        normal_contour)
from .quantile import (QuantileSet, QuantileVersion, check_loss,
                       directional_quantile, directional_quantiles, quantile,
                       quantile_set)

__all__ = [
    "DepthValue", "depth_counts", "depth_region_oracle",
    "depth_regions_oracle", "halfspace_depth", "max_hyperplane_mass",
    "max_line_count", "tangent_count", "tangent_mass", "tukey_median",
    "DirectionSet", "Envelope", "biplot_curve", "build_envelope",
    "build_envelopes", "coverage_search", "critical_directions",
    "enclosed_count", "rank_envelope", "uniform_directions", "ConfigError",
    "DataError", "DegenerateCovariate", "DegenerateRegion", "DegenerateTail",
    "EmptyFile", "EmptyRegion", "EmptySample", "ExtrapolationRefused",
    "InvalidP", "MissingColumn", "NoEnvelope", "NonFiniteValue",
    "NonNumericCell", "OutOfRegime", "QtomoError", "SingularCovariance",
    "TooFewDirections", "TooFewExceedances", "UnboundedRegion",
    "DirectionalQuantileEstimator", "EmpiricalEstimator", "ExtremeEstimator",
    "LinearQRFit", "QuantileRegressionEstimator", "TailModel",
    "conditional_envelope", "empirical_estimator", "extreme_estimator",
    "fit_gpd_tail", "gpd_quantile", "linear_qr", "pinball_loss",
    "ConvexRegion", "Halfplane", "RegionKind", "UnitDirection", "convex_hull",
    "distance_to_region", "hausdorff_distance", "intersect_halfplanes",
    "intersect_normals", "kappa", "polyline_self_intersects",
    "support_function", "EnclosedMass", "IndexingMode", "NormalFit",
    "TangentMass", "fit_normal", "inverse_normal_cdf", "normal_cdf",
    "normal_contour", "QuantileSet", "QuantileVersion", "check_loss",
    "directional_quantile", "directional_quantiles", "quantile",
    "quantile_set",
]

__version__ = "0.1.0"
