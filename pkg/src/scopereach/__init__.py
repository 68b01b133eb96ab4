"""Scope-bounded reachability for valence systems over graph monoids."""

__version__ = "0.1.0"

from .graph import ComplexityClass, Graph, build_graph, classify, family
from .words import (
    Op,
    ReductionStep,
    Word,
    apply_step,
    format_word,
    greedy_irreducible,
    is_identity,
    ops_independent,
    parse_word,
)
from .decomposition import (
    BlockDecomposition,
    ContextDecomposition,
    ReductionTrace,
    all_reductions,
    canonical_contexts,
    free_reduce_words,
    induced_decomposition,
    interaction_distance,
    is_block_decomposition,
    scope,
)
from .valence import RunWitness, Transition, ValenceSystem, build_system, oracle_bsreach
from .pda import NFA, PDA, anticlique_pda, intersect_nfa, pda_nonempty, singleton_counter_pda
from .abstraction import (
    E,
    BlockAbstraction,
    ContextAbstraction,
    blocks_cancel,
    blocks_commute,
    blocks_dependent,
    contexts_independent,
    make_block,
    make_context,
    represents,
)
from .solver import DecideResult, RNode, Verdict, decide, edges, enumerate_contexts, initial_node, one_step
from .generators import GadgetMachine, gen_bqa, gen_bva, gen_random, simulate_gadget
from .instances import Instance, dump_instance, load_instance, parse_instance, serialize_instance

__all__ = [name for name in dir() if not name.startswith("_")]
