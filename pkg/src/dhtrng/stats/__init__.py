"""Randomness evaluation: AIS-31 T0 to T5, seven SP 800-22 tests, three
min-entropy estimators, autocorrelation, bias and restart testing."""

from .acf import acf
from .ais31 import (autocorr_t5, disjointness_t0, longrun_t4, monobit_t1, poker_t2,
                    procedure_a, runs_t3)
from .bias import bias_report
from .entropy import collision_estimate, entropy_battery, markov_estimate, mcv_estimate
from .nist import (NIST_TESTS, nist_approx_entropy, nist_battery, nist_block_frequency,
                   nist_cusum, nist_frequency, nist_longest_run, nist_runs, nist_serial,
                   proportion_interval)
from .report import AcfSeries, InsufficientData, MinEntropyEstimate, TestReport, Verdict
from .period import find_period
from .restart import restart_test
from .special import igam, igamc, normal_cdf

__all__ = ["AcfSeries", "InsufficientData", "MinEntropyEstimate", "NIST_TESTS", "TestReport",
           "Verdict", "acf", "autocorr_t5", "bias_report", "collision_estimate",
           "disjointness_t0", "entropy_battery", "find_period", "igam", "igamc", "longrun_t4", "markov_estimate",
           "mcv_estimate", "monobit_t1", "nist_approx_entropy", "nist_battery",
           "nist_block_frequency", "nist_cusum", "nist_frequency", "nist_longest_run",
           "nist_runs", "nist_serial", "normal_cdf", "poker_t2", "procedure_a",
           "proportion_interval", "restart_test", "runs_t3"]
