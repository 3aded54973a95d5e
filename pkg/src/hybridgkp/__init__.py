"""Compiling qubit circuits into GKP-encoded qudits with hybrid qubit-oscillator gates."""

from .kernels import BACKEND
from .wavepacket import ParameterError, PacketTrain, Wavepacket
from .gkp_states import (GkpCodeParams, comb_params, default_L, make_codeword, make_comb_codeword,
                         make_gkp_codeword, symmetric_params)
from .hybrid_sim import ElementaryGate, HybridState, apply_gate, inner_product, run_circuit
from .logical_layer import LogicalCircuit, LogicalMap, build_bit_transfer, build_two_qubit
from .compiler import ElementaryCircuit, audit, lower_basic, lower_transfer, lower_two_qubit
from .error_analysis import BMatrix, ErrorReport, analytic_bound, compute_B, sparse_bound
from .clifford import QuditGate, decompose, gate_matrix

__version__ = "0.1.0"
