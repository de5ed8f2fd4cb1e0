"""Empirical normality analysis of base-b digit expansions."""

from normality.delta import (
    DeltaScheme,
    ExpectedRow,
    PseudonormalResult,
    delta_digits,
    delta_exact,
    delta_scheme,
    delta_stream,
    digit_set,
    exact_delta_scheme,
    expected_row,
    pseudonormal_test,
    swap_expansion,
    swap_stream,
)
from normality.digits import (
    DigitSource,
    EventuallyPeriodicExpansion,
    as_source,
    digit_at,
    parse_expansion,
    take_prefix,
)
from normality.errors import (
    BadDigit,
    BaseMismatch,
    DegenerateWindow,
    EmptyScheme,
    Exhausted,
    NormalityError,
    TermCap,
    ZeroDelta,
)
from normality.exact import (
    expansion_to_rational,
    int_to_digits,
    multiplicatively_dependent,
    rational_to_expansion,
)
from normality.ngrams import (
    ConditionalMatrix,
    NGramTable,
    block_normal_dev,
    count_ngrams,
    density_trajectory,
    empirical_prob,
    gap_conditional,
    prefix_conditional,
    simply_normal_dev,
    weyl_sum,
)
from normality.sources import (
    SourceSpec,
    casual_source,
    champernowne,
    fibonacci_constant,
    file_source,
    martin_partial,
    oscillating_example,
    parse_source_spec,
    rational_source,
)

__version__ = "0.1.0"
