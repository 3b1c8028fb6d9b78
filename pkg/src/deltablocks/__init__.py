"""Delta-oriented variability for hierarchical block-diagram models."""
from .delta import (
    AddConnection, AddModelRef, AddPort, AddSubsystem, After, And, BlockSel, ConnectionSel, Delta,
    Direction, ModelSub, ModifyModel, ModifySubsystem, Not, Or, PortSel, ProductConfiguration, Remove,
    Replace, SubsystemSub, TRUE, TrueAoc,
)
from .dsl import ParseError, parse_delta, parse_deltas, parse_library, parse_products, render_delta, render_library
from .engine import AppCode, ApplicationError, apply_add, apply_delta, apply_modify_subsystem, apply_remove, apply_replace
from .export import DotDocument, export_dot
from .model import (
    Boundary, ChildPort, Connection, Context, Interface, Model, ModelLibrary, ModelReference, PathNotFound,
    Subsystem, UnknownModel, lookup_context, resolve_interface,
)
from .scheduler import (
    DeltaLibrary, GenerationResult, OrderFailure, UnknownDelta, Unsatisfiable, compute_order, evaluate_aoc,
    generate,
)
from .wellformed import DiagCode, Diagnostic, Severity, check_wellformed

__version__ = "0.1.0"
