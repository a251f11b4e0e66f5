"""Path-sensitive symbolic-heap analysis over per-function CFGs.

The engine explores execution paths through each function's control-flow
graph while tracking an abstract heap: which allocation sites are live,
freed, or escaped, what each local points to, and which stores have been
read.  Allocation calls fork the path into a success branch (a definitely
non-null block) and a failure branch (a null result), so null checks in the
program prune the failure path naturally instead of requiring dominator
bookkeeping.

Checkers are toggled through a CheckerConfig; named profiles emulate the
detection columns of the tools compared in the benchmark corpus.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import frontend as ast
from .cfg import Cfg, LOOP_BACK, build_cfg

# ---------------------------------------------------------------------------
# Checker ids, finding kinds, configuration
# ---------------------------------------------------------------------------

CHECKER_NULL_DEREF = "NULL_DEREF"
CHECKER_UNCHECKED_ALLOC = "UNCHECKED_ALLOC"
CHECKER_MEMORY_LEAK = "MEMORY_LEAK"
CHECKER_REALLOC_LEAK = "REALLOC_LEAK"
CHECKER_INVALID_FREE = "INVALID_FREE"
CHECKER_INTERIOR_FREE = "INTERIOR_FREE"
CHECKER_DEAD_STORE = "DEAD_STORE"
CHECKER_DEAD_STORE_NULL_INIT = "DEAD_STORE_NULL_INIT"
CHECKER_UNINIT_USE = "UNINIT_USE"

ALL_CHECKERS = frozenset({
    CHECKER_NULL_DEREF, CHECKER_UNCHECKED_ALLOC, CHECKER_MEMORY_LEAK,
    CHECKER_REALLOC_LEAK, CHECKER_INVALID_FREE, CHECKER_INTERIOR_FREE,
    CHECKER_DEAD_STORE, CHECKER_DEAD_STORE_NULL_INIT, CHECKER_UNINIT_USE,
})

KIND_NULL_DEREFERENCE = "NULL_DEREFERENCE"
KIND_MEMORY_LEAK = "MEMORY_LEAK"
KIND_INVALID_FREE = "INVALID_FREE"
KIND_INVALID_DEREFERENCE = "INVALID_DEREFERENCE"
KIND_DEAD_STORE = "DEAD_STORE"
KIND_UNINITIALIZED_VALUE = "UNINITIALIZED_VALUE"
KIND_RESOURCE_LEAK = "RESOURCE_LEAK"

# Kinds that may appear in findings produced by this analyzer.
ANALYZER_KINDS = frozenset({
    KIND_NULL_DEREFERENCE, KIND_MEMORY_LEAK, KIND_INVALID_FREE,
    KIND_DEAD_STORE, KIND_UNINITIALIZED_VALUE,
})

# Kinds accepted in reports, ground truth and classification.  Some occur
# only in ingested external reports or truth manifests, never from the
# analyzer itself.
ALL_KINDS = ANALYZER_KINDS | frozenset({
    KIND_INVALID_DEREFERENCE, KIND_RESOURCE_LEAK,
    "BUFFER_OVERFLOW", "DANGLING_POINTER", "OUT_OF_BOUNDS",
})

CHECKER_KIND = {
    CHECKER_NULL_DEREF: KIND_NULL_DEREFERENCE,
    CHECKER_UNCHECKED_ALLOC: KIND_NULL_DEREFERENCE,
    CHECKER_MEMORY_LEAK: KIND_MEMORY_LEAK,
    CHECKER_REALLOC_LEAK: KIND_MEMORY_LEAK,
    CHECKER_INVALID_FREE: KIND_INVALID_FREE,
    CHECKER_INTERIOR_FREE: KIND_INVALID_FREE,
    CHECKER_DEAD_STORE: KIND_DEAD_STORE,
    CHECKER_DEAD_STORE_NULL_INIT: KIND_DEAD_STORE,
    CHECKER_UNINIT_USE: KIND_UNINITIALIZED_VALUE,
}


class AnalysisBudgetExceeded(Exception):
    """Path exploration hit the configured budget.

    The engine never raises this during a normal run: it truncates
    exploration and marks the result incomplete instead.  The class exists
    for callers that want to escalate an incomplete result into an error.
    """


@dataclass(frozen=True)
class CheckerConfig:
    """An enabled-checker set plus the capability flags of a tool profile."""

    profile: str
    enabled: frozenset
    interprocedural: bool = True
    # When False, allocations of the shape `malloc(sizeof(*p))` are not
    # tracked (the result is Unknown), reproducing an analyzer that cannot
    # size the pointee expression.
    sizeof_star_tracking: bool = True
    # When False, the realloc-overwrite checker is suppressed in functions
    # that call user-defined functions.
    realloc_with_calls: bool = True
    # When False, freeing a struct silently lets its heap-pointing fields
    # escape instead of reporting them.
    struct_field_leak: bool = True
    unroll_bound: int = 2
    path_budget: int = 4096

    def __post_init__(self):
        unknown = self.enabled - ALL_CHECKERS
        if unknown:
            raise ValueError(f"unknown checker ids: {sorted(unknown)}")
        if CHECKER_DEAD_STORE_NULL_INIT in self.enabled \
                and CHECKER_DEAD_STORE not in self.enabled:
            raise ValueError("DEAD_STORE_NULL_INIT requires DEAD_STORE")

    def on(self, checker: str) -> bool:
        return checker in self.enabled

    def with_checkers(self, enable=(), disable=()) -> "CheckerConfig":
        enabled = (self.enabled | frozenset(enable)) - frozenset(disable)
        return replace(self, enabled=enabled)


PROFILES = {
    "union": CheckerConfig("union", ALL_CHECKERS),
    "cppcheck-like": CheckerConfig(
        "cppcheck-like",
        frozenset({CHECKER_NULL_DEREF, CHECKER_MEMORY_LEAK,
                   CHECKER_REALLOC_LEAK, CHECKER_INVALID_FREE,
                   CHECKER_UNINIT_USE}),
        interprocedural=False,
        realloc_with_calls=False,
    ),
    "clang-like": CheckerConfig(
        "clang-like",
        frozenset({CHECKER_NULL_DEREF, CHECKER_MEMORY_LEAK,
                   CHECKER_DEAD_STORE, CHECKER_INVALID_FREE,
                   CHECKER_INTERIOR_FREE, CHECKER_UNINIT_USE}),
        struct_field_leak=False,
    ),
    "infer-like": CheckerConfig(
        "infer-like",
        frozenset({CHECKER_NULL_DEREF, CHECKER_UNCHECKED_ALLOC,
                   CHECKER_MEMORY_LEAK, CHECKER_REALLOC_LEAK,
                   CHECKER_DEAD_STORE, CHECKER_DEAD_STORE_NULL_INIT}),
        sizeof_star_tracking=False,
    ),
    "predator-like": CheckerConfig(
        "predator-like",
        frozenset({CHECKER_NULL_DEREF, CHECKER_MEMORY_LEAK,
                   CHECKER_INVALID_FREE, CHECKER_INTERIOR_FREE}),
    ),
}


@dataclass(frozen=True, order=True)
class Finding:
    file: str
    line: int
    kind: str
    checker: str
    message: str
    function: str

    def __post_init__(self):
        if CHECKER_KIND.get(self.checker, self.kind) != self.kind:
            raise ValueError(
                f"kind {self.kind} inconsistent with checker {self.checker}")


# ---------------------------------------------------------------------------
# Abstract values
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PtrValue:
    """Abstract pointer value.

    kind: null | block | stack | unknown | freed | uninit.
    For null values, origin records why the pointer may be null
    ("literal", "alloc_failure", "refined") and line where it was assigned.
    param_index marks values flowing in unchanged from a parameter, which
    the summary pass uses to detect parameter frees and derefs.
    """

    kind: str
    origin: str = ""
    line: int = 0
    site: int = -1
    offset: int = 0
    var: str = ""
    param_index: int = -1

    @staticmethod
    def null(origin: str, line: int = 0) -> "PtrValue":
        return PtrValue("null", origin=origin, line=line)

    @staticmethod
    def block(site: int, offset: int = 0) -> "PtrValue":
        return PtrValue("block", site=site, offset=offset)

    @staticmethod
    def stack(var: str) -> "PtrValue":
        return PtrValue("stack", var=var)


@dataclass(frozen=True)
class ScalarValue:
    state: str  # zero | nonzero | unknown | uninit


UNKNOWN = ScalarValue("unknown")
ZERO = ScalarValue("zero")
NONZERO = ScalarValue("nonzero")
SCALAR_UNINIT = ScalarValue("uninit")
PTR_UNINIT = PtrValue("uninit")
PTR_UNKNOWN = PtrValue("unknown")


def is_uninit(value) -> bool:
    return (isinstance(value, ScalarValue) and value.state == "uninit") or \
        (isinstance(value, PtrValue) and value.kind == "uninit")


def truthiness(value) -> str:
    """"true", "false", or "unknown"."""
    if isinstance(value, PtrValue):
        if value.kind == "null":
            return "false"
        if value.kind in ("block", "stack", "freed"):
            return "true"
        return "unknown"
    if isinstance(value, ScalarValue):
        if value.state == "zero":
            return "false"
        if value.state == "nonzero":
            return "true"
    return "unknown"


def value_eq(left, right) -> bool | None:
    """Abstract equality; None when undecided."""
    lp, rp = isinstance(left, PtrValue), isinstance(right, PtrValue)
    if lp and rp:
        if left.kind == "null" and right.kind == "null":
            return True
        if {left.kind, right.kind} <= {"null", "block", "stack"} \
                and (left.kind == "null") != (right.kind == "null"):
            return False
        return None
    if lp or rp:
        ptr, other = (left, right) if lp else (right, left)
        if isinstance(other, ScalarValue) and other.state == "zero":
            if ptr.kind == "null":
                return True
            if ptr.kind in ("block", "stack"):
                return False
        return None
    if isinstance(left, ScalarValue) and isinstance(right, ScalarValue):
        if left.state == "zero" and right.state == "zero":
            return True
        if {left.state, right.state} == {"zero", "nonzero"}:
            return False
    return None


# ---------------------------------------------------------------------------
# Per-path heap state
# ---------------------------------------------------------------------------


@dataclass
class SiteInfo:
    line: int          # allocation line
    status: str        # live | freed | leaked (leak already reported)
    escaped: bool
    fields: dict
    default_field: object
    hint: str = ""     # variable name for messages


@dataclass
class AbstractHeap:
    """State carried along one explored path."""

    env: dict = field(default_factory=dict)
    sites: dict = field(default_factory=dict)
    cur_store: dict = field(default_factory=dict)  # var -> (var, line)
    ret_line: int = 0
    next_site: int = 0

    def clone(self) -> "AbstractHeap":
        return AbstractHeap(
            env=dict(self.env),
            sites={sid: SiteInfo(s.line, s.status, s.escaped,
                                 dict(s.fields), s.default_field, s.hint)
                   for sid, s in self.sites.items()},
            cur_store=dict(self.cur_store),
            ret_line=self.ret_line,
            next_site=self.next_site,
        )

    def new_site(self, line: int, default_field) -> int:
        sid = self.next_site
        self.next_site += 1
        self.sites[sid] = SiteInfo(line, "live", False, {}, default_field)
        return sid

    def reachable_sites(self, roots=None) -> set:
        """Sites reachable from env values (or the given root values)."""
        if roots is None:
            roots = self.env.values()
        work = [v.site for v in roots
                if isinstance(v, PtrValue) and v.kind == "block"]
        seen = set()
        while work:
            sid = work.pop()
            if sid in seen or sid not in self.sites:
                continue
            seen.add(sid)
            if self.sites[sid].status != "live":
                # A freed or leaked block's fields keep nothing alive.
                continue
            for v in self.sites[sid].fields.values():
                if isinstance(v, PtrValue) and v.kind == "block":
                    work.append(v.site)
        return seen

    def propagate_escapes(self) -> None:
        """Anything reachable from an escaped site has escaped too."""
        changed = True
        while changed:
            changed = False
            for s in self.sites.values():
                if not s.escaped:
                    continue
                for v in s.fields.values():
                    if isinstance(v, PtrValue) and v.kind == "block":
                        target = self.sites.get(v.site)
                        if target is not None and not target.escaped:
                            target.escaped = True
                            changed = True

    def escape_value(self, value) -> None:
        if isinstance(value, PtrValue) and value.kind == "block":
            info = self.sites.get(value.site)
            if info is not None:
                info.escaped = True
                self.propagate_escapes()


@dataclass(frozen=True)
class FunctionSummary:
    name: str
    returns_fresh: bool = False
    may_return_null: bool = False
    returns_null_always: bool = False
    frees_params: frozenset = frozenset()
    param_deref: frozenset = frozenset()


@dataclass
class AnalysisResult:
    """Findings plus an incompleteness flag; iterates like a finding list."""

    findings: list
    incomplete: bool = False

    def __iter__(self):
        return iter(self.findings)

    def __len__(self):
        return len(self.findings)

    def __getitem__(self, idx):
        return self.findings[idx]


# ---------------------------------------------------------------------------
# The engine
# ---------------------------------------------------------------------------


def _collect_calls(node, out: set) -> None:
    if isinstance(node, ast.Call):
        out.add(node.name)
    for value in vars(node).values():
        if isinstance(value, ast.Node):
            _collect_calls(value, out)
        elif isinstance(value, list):
            for item in value:
                if isinstance(item, ast.Node):
                    _collect_calls(item, out)


def _collect_addr_taken(node, out: set) -> None:
    if isinstance(node, ast.AddressOf) and isinstance(node.expr, ast.Ident):
        out.add(node.expr.name)
    for value in vars(node).values():
        if isinstance(value, ast.Node):
            _collect_addr_taken(value, out)
        elif isinstance(value, list):
            for item in value:
                if isinstance(item, ast.Node):
                    _collect_addr_taken(item, out)


class _FunctionAnalysis:
    def __init__(self, tu: ast.TranslationUnit, fn: ast.FunctionDef, cfg: Cfg,
                 config: CheckerConfig, summaries: dict, report: bool):
        self.tu = tu
        self.fn = fn
        self.cfg = cfg
        self.config = config
        self.summaries = summaries
        self.report = report
        self.findings: set[Finding] = set()
        self.incomplete = False
        self.paths_done = 0
        self.returns: list = []  # (value, fresh_live_block: bool) snapshots
        self.frees_params: set[int] = set()
        self.param_deref: set[int] = set()

        calls: set[str] = set()
        _collect_calls_in_fn(fn, calls)
        self.has_user_calls = any(
            name not in ast.BUILTIN_FUNCTIONS for name in calls)

        self.addr_taken: set[str] = set()
        _collect_addr_taken_in_fn(fn, self.addr_taken)

        self.param_names = [name for name, _ in fn.params]
        self.global_names = {g.name for g in tu.globals}
        self.defined_functions = {f.name for f in tu.functions}

        # Dead-store bookkeeping is global across paths: a store is dead
        # only if no explored path reads it.
        self.stores: dict = {}          # (var, line) -> value class
        self.read_stores: set = set()

    # -- reporting --

    def emit(self, checker: str, line: int, message: str) -> None:
        if not self.report or checker not in self.config.enabled:
            return
        self.findings.add(Finding(
            file=self.tu.unit.path, line=line, kind=CHECKER_KIND[checker],
            checker=checker, message=message, function=self.fn.name))

    # -- entry point --

    def run(self) -> None:
        state = AbstractHeap()
        for name, ctype in self.fn.params:
            idx = self.param_names.index(name)
            if ctype.is_pointer:
                state.env[name] = PtrValue("unknown", param_index=idx)
            else:
                state.env[name] = ScalarValue("unknown")
        for g in self.tu.globals:
            state.env[g.name] = UNKNOWN
        self._exec(self.cfg.entry, state, {})
        if self.report:
            self.check_dead_store()

    # -- path walking --

    def _exec(self, block_id: int, state: AbstractHeap, back_counts: dict) -> None:
        if self.paths_done >= self.config.path_budget:
            self.incomplete = True
            return
        blk = self.cfg.block(block_id)
        states = [state]
        for stmt in blk.statements:
            if isinstance(stmt, (ast.If, ast.While)):
                continue  # the condition is handled with the terminator
            next_states: list[AbstractHeap] = []
            for s in states:
                next_states.extend(self.transfer(stmt, s))
            states = next_states
            if not states:
                return
        if block_id == self.cfg.exit:
            for s in states:
                self.finish_path(s)
            return
        succs = self.cfg.successors(block_id)
        if blk.terminator == "branch":
            for s in states:
                self._branch(block_id, blk.branch_cond, s, back_counts, succs)
        else:
            for s in states:
                for dst, kind in succs:
                    self._follow(dst, s, back_counts, kind, block_id)

    def _follow(self, dst: int, state: AbstractHeap, back_counts: dict,
                edge_kind: str, src: int) -> None:
        if edge_kind == LOOP_BACK:
            key = (src, dst)
            taken = back_counts.get(key, 0)
            if taken >= self.config.unroll_bound:
                return  # bounded unrolling: abandon this continuation
            back_counts = dict(back_counts)
            back_counts[key] = taken + 1
        self._exec(dst, state, back_counts)

    def _branch(self, block_id: int, cond, state: AbstractHeap,
                back_counts: dict, succs) -> None:
        true_edges = [(d, k) for d, k in succs if k == "true-branch"]
        false_edges = [(d, k) for d, k in succs if k == "false-branch"]
        for cstate, value in self.eval(cond, state):
            truth = self._cond_truth(cond, value, cstate)
            if truth != "false":
                tstate = cstate.clone() if truth == "unknown" else cstate
                self._refine(tstate, cond, branch=True)
                for dst, kind in true_edges:
                    self._follow(dst, tstate, back_counts, kind, block_id)
            if truth != "true":
                self._refine(cstate, cond, branch=False)
                for dst, kind in false_edges:
                    self._follow(dst, cstate, back_counts, kind, block_id)

    def _cond_truth(self, cond, value, state: AbstractHeap) -> str:
        if isinstance(cond, ast.BinOp) and cond.op in ("==", "!="):
            # `value` already folded by eval; fall through to truthiness.
            pass
        return truthiness(value)

    def _refine(self, state: AbstractHeap, cond, branch: bool) -> None:
        """Narrow a pointer tested by the condition on the taken branch."""
        target = self._null_test_target(cond)
        if target is None:
            return
        var, null_when_true = target
        null_branch = (branch == null_when_true)
        value = state.env.get(var)
        if null_branch and isinstance(value, PtrValue) and value.kind == "unknown":
            state.env[var] = PtrValue.null("refined", cond.loc.line)

    @staticmethod
    def _null_test_target(cond):
        """Return (var, true-branch-means-null) for recognized null tests."""
        if isinstance(cond, ast.Ident):
            return cond.name, False
        if isinstance(cond, ast.UnaryNot) and isinstance(cond.expr, ast.Ident):
            return cond.expr.name, True
        if isinstance(cond, ast.BinOp) and cond.op in ("==", "!="):
            sides = (cond.left, cond.right)
            for ident, other in (sides, sides[::-1]):
                if isinstance(ident, ast.Ident) and _is_null_expr(other):
                    return ident.name, cond.op == "=="
        return None

    # -- statement transfer --

    def transfer(self, stmt, state: AbstractHeap) -> list:
        out: list[AbstractHeap] = []
        if isinstance(stmt, ast.VarDecl):
            if stmt.init is None:
                state.env[stmt.name] = \
                    PTR_UNINIT if stmt.ctype.is_pointer else SCALAR_UNINIT
                out.append(state)
            else:
                self._check_realloc_overwrite(stmt.name, stmt.init, stmt.loc)
                cls = "null-or-zero" if _is_null_expr(stmt.init) else "other"
                for s, v in self.eval(stmt.init, state):
                    self._store_var(s, stmt.name, v, stmt.loc.line, cls)
                    out.append(s)
        elif isinstance(stmt, ast.Assign):
            if isinstance(stmt.target, ast.Ident):
                self._check_realloc_overwrite(stmt.target.name, stmt.value, stmt.loc)
            for s, v in self.eval(stmt.value, state):
                out.extend(self._assign(stmt.target, v, s, stmt.loc))
        elif isinstance(stmt, ast.ExprStmt):
            out.extend(s for s, _ in self.eval(stmt.expr, state))
        elif isinstance(stmt, ast.Return):
            if stmt.expr is None:
                self.returns.append((None, False))
                state.ret_line = stmt.loc.line
                out.append(state)
            else:
                for s, v in self.eval(stmt.expr, state):
                    fresh = isinstance(v, PtrValue) and v.kind == "block" \
                        and s.sites.get(v.site) is not None \
                        and s.sites[v.site].status == "live"
                    self.returns.append((v, fresh))
                    s.escape_value(v)
                    s.ret_line = stmt.loc.line
                    out.append(s)
        else:
            out.append(state)
        for s in out:
            self.check_memory_leak_at(s, _stmt_line(stmt))
        return out

    def _store_var(self, state: AbstractHeap, name: str, value,
                   line: int, cls: str) -> None:
        key = (name, line)
        self.stores[key] = cls
        state.cur_store[name] = key
        state.env[name] = value
        if isinstance(value, PtrValue) and value.kind == "block":
            info = state.sites.get(value.site)
            if info is not None and not info.hint:
                info.hint = name

    def _assign(self, target, value, state: AbstractHeap, loc) -> list:
        if isinstance(target, ast.Ident):
            cls = "null-or-zero" if _is_null_expr_value(value) else "other"
            self._store_var(state, target.name, value, loc.line, cls)
            return [state]
        if isinstance(target, ast.Deref):
            results = []
            for s, base in self.eval(target.expr, state):
                base = self.check_null_deref(s, base, target.expr, target.loc)
                if isinstance(base, PtrValue):
                    if base.kind == "stack":
                        s.env[base.var] = value
                    elif base.kind == "block":
                        info = s.sites.get(base.site)
                        if info is not None:
                            info.fields[""] = value
                            if info.escaped:
                                s.escape_value(value)
                    elif base.kind == "unknown":
                        s.escape_value(value)
                results.append(s)
            return results
        if isinstance(target, ast.FieldAccess):
            results = []
            for s, base in self.eval(target.expr, state, reading=True):
                if target.via_pointer:
                    base = self.check_null_deref(s, base, target.expr, target.loc)
                if isinstance(base, PtrValue) and base.kind == "block":
                    info = s.sites.get(base.site)
                    if info is not None:
                        info.fields[target.fieldname] = value
                        if isinstance(value, PtrValue) and value.kind == "block":
                            vinfo = s.sites.get(value.site)
                            if vinfo is not None and not vinfo.hint:
                                vinfo.hint = f"{info.hint}.{target.fieldname}" \
                                    if info.hint else target.fieldname
                        if info.escaped:
                            s.escape_value(value)
                else:
                    s.escape_value(value)
                results.append(s)
            return results
        return [state]

    def _check_realloc_overwrite(self, target_name: str, rhs, loc) -> None:
        """`p = realloc(p, n)`: the old block is lost if realloc fails."""
        expr = rhs.expr if isinstance(rhs, ast.Cast) else rhs
        if not (isinstance(expr, ast.Call) and expr.name == "realloc"):
            return
        if not expr.args or not isinstance(expr.args[0], ast.Ident):
            return
        if expr.args[0].name != target_name:
            return
        if not self.config.realloc_with_calls and self.has_user_calls:
            return
        self.emit(CHECKER_REALLOC_LEAK, loc.line,
                  f"Common realloc mistake: '{target_name}' nulled "
                  f"but not freed upon failure")

    # -- expression evaluation --

    def eval(self, expr, state: AbstractHeap, reading: bool = True) -> list:
        """Evaluate to a list of (state, value) outcomes (allocations fork)."""
        if isinstance(expr, ast.IntLit):
            return [(state, ZERO if expr.value == 0 else NONZERO)]
        if isinstance(expr, ast.StrLit):
            return [(state, NONZERO)]
        if isinstance(expr, ast.NullLit):
            return [(state, PtrValue.null("literal", expr.loc.line))]
        if isinstance(expr, (ast.SizeofType, ast.SizeofExpr)):
            return [(state, NONZERO)]  # the operand is not evaluated
        if isinstance(expr, ast.Ident):
            return [(state, self._read_var(state, expr))]
        if isinstance(expr, ast.AddressOf):
            if isinstance(expr.expr, ast.Ident):
                return [(state, PtrValue.stack(expr.expr.name))]
            return [(state, UNKNOWN)]
        if isinstance(expr, ast.Deref):
            results = []
            for s, base in self.eval(expr.expr, state):
                base = self.check_null_deref(s, base, expr.expr, expr.loc)
                results.append((s, self._read_through(s, base, "", expr.loc)))
            return results
        if isinstance(expr, ast.FieldAccess):
            results = []
            for s, base in self.eval(expr.expr, state):
                if expr.via_pointer:
                    base = self.check_null_deref(s, base, expr.expr, expr.loc)
                results.append(
                    (s, self._read_through(s, base, expr.fieldname, expr.loc)))
            return results
        if isinstance(expr, ast.UnaryNot):
            results = []
            for s, v in self.eval(expr.expr, state):
                truth = truthiness(v)
                value = {"true": ZERO, "false": NONZERO}.get(truth, UNKNOWN)
                results.append((s, value))
            return results
        if isinstance(expr, ast.Cast):
            return self.eval(expr.expr, state)
        if isinstance(expr, ast.BinOp):
            return self._eval_binop(expr, state)
        if isinstance(expr, ast.Call):
            return self.eval_call(expr, state)
        return [(state, UNKNOWN)]

    def _read_var(self, state: AbstractHeap, ident: ast.Ident):
        name = ident.name
        key = state.cur_store.get(name)
        if key is not None:
            self.read_stores.add(key)
        value = state.env.get(name, UNKNOWN)
        if is_uninit(value):
            self.check_uninit_use(name, ident.loc)
            value = UNKNOWN if isinstance(value, ScalarValue) else PTR_UNKNOWN
            state.env[name] = value
        return value

    def _read_through(self, state: AbstractHeap, base, fieldname: str, loc):
        if not isinstance(base, PtrValue):
            return UNKNOWN
        if base.kind == "stack" and fieldname == "":
            key = state.cur_store.get(base.var)
            if key is not None:
                self.read_stores.add(key)
            value = state.env.get(base.var, UNKNOWN)
            if is_uninit(value):
                self.check_uninit_use(base.var, loc)
                value = UNKNOWN
                state.env[base.var] = value
            return value
        if base.kind == "block":
            info = state.sites.get(base.site)
            if info is None:
                return UNKNOWN
            value = info.fields.get(fieldname, info.default_field)
            if is_uninit(value):
                self.check_uninit_use(info.hint or "memory", loc)
                value = UNKNOWN
                info.fields[fieldname] = value
            return value
        return UNKNOWN

    def _eval_binop(self, expr: ast.BinOp, state: AbstractHeap) -> list:
        results = []
        for s1, left in self.eval(expr.left, state):
            for s2, right in self.eval(expr.right, s1):
                results.append((s2, self._binop_value(expr.op, left, right, expr)))
        return results

    def _binop_value(self, op: str, left, right, expr: ast.BinOp):
        if op in ("==", "!="):
            eq = value_eq(left, right)
            if eq is None:
                return UNKNOWN
            return NONZERO if (eq == (op == "==")) else ZERO
        if op in ("<", ">", "<=", ">="):
            return UNKNOWN
        # Pointer arithmetic: keep the block, adjust the offset when the
        # other operand is a literal (interior pointers stay representable).
        for ptr, other, sign in ((left, right, 1), (right, left, 1)):
            if isinstance(ptr, PtrValue) and ptr.kind == "block" and op in ("+", "-"):
                delta = _literal_of(expr.right if ptr is left else expr.left)
                if delta is None:
                    return PtrValue.block(ptr.site, offset=1)  # nonzero, unknown
                if op == "-" and ptr is left:
                    delta = -delta
                return PtrValue.block(ptr.site, offset=ptr.offset + delta)
        return UNKNOWN

    # -- calls --

    def eval_call(self, call: ast.Call, state: AbstractHeap) -> list:
        name = call.name
        if name in ("malloc", "calloc"):
            return self._eval_alloc(call, state)
        if name == "realloc":
            return self._eval_realloc(call, state)
        if name == "free":
            return self._eval_free(call, state)
        if name in ("printf", "memset", "memcpy", "memmove"):
            self._eval_args(call.args, state)
            return [(s, UNKNOWN) for s, _ in self._arg_outcomes]
        return self._eval_user_call(call, state)

    def _eval_args(self, args, state: AbstractHeap) -> None:
        # Evaluate arguments left to right, threading forks through; the
        # (state, values) outcomes land in self._arg_outcomes.
        outcomes = [(state, [])]
        for arg in args:
            next_outcomes = []
            for s, vals in outcomes:
                for s2, v in self.eval(arg, s):
                    next_outcomes.append((s2, vals + [v]))
            outcomes = next_outcomes
        self._arg_outcomes = outcomes

    def _eval_alloc(self, call: ast.Call, state: AbstractHeap) -> list:
        lost = not self.config.sizeof_star_tracking and any(
            isinstance(a, ast.SizeofExpr) and a.star_of_ident for a in call.args)
        default_field = ZERO if call.name == "calloc" else SCALAR_UNINIT
        results = []
        self._eval_args(call.args, state)
        for s, _vals in self._arg_outcomes:
            if lost:
                results.append((s, PTR_UNKNOWN))
                continue
            fail = s.clone()
            sid = s.new_site(call.loc.line, default_field)
            results.append((s, PtrValue.block(sid)))
            results.append((fail, PtrValue.null("alloc_failure", call.loc.line)))
        return results

    def _eval_realloc(self, call: ast.Call, state: AbstractHeap) -> list:
        results = []
        self._eval_args(call.args, state)
        for s, vals in self._arg_outcomes:
            old = vals[0] if vals else UNKNOWN
            fail = s.clone()
            # Success: the old block is consumed by realloc itself.
            if isinstance(old, PtrValue) and old.kind == "block":
                info = s.sites.get(old.site)
                if info is not None:
                    info.status = "freed"
            sid = s.new_site(call.loc.line, SCALAR_UNINIT)
            results.append((s, PtrValue.block(sid)))
            # Failure: the old block stays allocated.  The dedicated
            # realloc-overwrite checker owns this pattern, so the block is
            # marked escaped rather than double-reported as a generic leak.
            if isinstance(old, PtrValue) and old.kind == "block":
                fail.escape_value(old)
            results.append((fail, PtrValue.null("alloc_failure", call.loc.line)))
        return results

    def _eval_free(self, call: ast.Call, state: AbstractHeap) -> list:
        results = []
        self._eval_args(call.args, state)
        for s, vals in self._arg_outcomes:
            v = vals[0] if vals else UNKNOWN
            self.check_invalid_free(s, v, call)
            results.append((s, UNKNOWN))
        return results

    def _eval_user_call(self, call: ast.Call, state: AbstractHeap) -> list:
        summary = self.summaries.get(call.name) \
            if self.config.interprocedural else None
        results = []
        self._eval_args(call.args, state)
        for s, vals in self._arg_outcomes:
            if summary is None:
                for v in vals:
                    s.escape_value(v)
                results.append((s, UNKNOWN))
                continue
            for idx in summary.frees_params:
                if idx < len(vals):
                    v = vals[idx]
                    if isinstance(v, PtrValue) and v.kind == "block":
                        info = s.sites.get(v.site)
                        if info is not None and info.status == "live":
                            info.status = "freed"
            if summary.returns_fresh:
                sid = s.new_site(call.loc.line, UNKNOWN)
                s.sites[sid].hint = call.name
                results.append((s, PtrValue.block(sid)))
            elif summary.returns_null_always:
                results.append((s, PtrValue.null("literal", call.loc.line)))
            else:
                results.append((s, UNKNOWN))
        return results

    # -- checkers --

    def check_null_deref(self, state: AbstractHeap, value, expr, loc):
        """Check a dereference through `value`; returns the recovered value."""
        if not isinstance(value, PtrValue):
            return value
        if isinstance(value, PtrValue) and value.param_index >= 0:
            self.param_deref.add(value.param_index)
        if value.kind != "null":
            return value
        name = expr.name if isinstance(expr, ast.Ident) else "pointer"
        if value.origin == "alloc_failure":
            self.emit(CHECKER_UNCHECKED_ALLOC, loc.line,
                      f"pointer `{name}` last assigned on line {value.line} "
                      f"could be null and is dereferenced at line {loc.line}")
        else:
            self.emit(CHECKER_NULL_DEREF, loc.line,
                      f"pointer `{name}` is NULL and is dereferenced "
                      f"at line {loc.line}")
        # Error recovery: continue the path as if the pointer were valid.
        if isinstance(expr, ast.Ident):
            state.env[expr.name] = PTR_UNKNOWN
        return PTR_UNKNOWN

    def check_invalid_free(self, state: AbstractHeap, value, call: ast.Call) -> None:
        line = call.loc.line
        arg = call.args[0] if call.args else None
        name = arg.name if isinstance(arg, ast.Ident) else "pointer"
        if not isinstance(value, PtrValue):
            return
        if value.param_index >= 0:
            self.frees_params.add(value.param_index)
        if value.kind == "stack":
            self.emit(CHECKER_INVALID_FREE, line,
                      f"free of stack address `&{value.var}`")
            return
        if value.kind != "block":
            return  # free(NULL) and free(unknown) are no-ops here
        info = state.sites.get(value.site)
        if info is None:
            return
        if info.status == "freed":
            self.emit(CHECKER_INVALID_FREE, line,
                      f"double free of `{name}` (allocated at line {info.line})")
            return
        if value.offset != 0:
            self.emit(CHECKER_INTERIOR_FREE, line,
                      f"free of interior pointer `{name}` "
                      f"(offset inside block allocated at line {info.line})")
        if info.status == "live":
            info.status = "freed"
            self._check_field_leaks(state, info, name, line)

    def _check_field_leaks(self, state: AbstractHeap, freed: SiteInfo,
                           struct_name: str, line: int) -> None:
        """A struct was freed; handle heap blocks hanging off its fields."""
        field_blocks = [(fname, v.site) for fname, v in freed.fields.items()
                        if isinstance(v, PtrValue) and v.kind == "block"]
        if not field_blocks:
            return
        reachable = state.reachable_sites()
        for fname, sid in field_blocks:
            info = state.sites.get(sid)
            if info is None or info.status != "live" or info.escaped:
                continue
            if sid in reachable:
                continue
            if self.config.struct_field_leak:
                self.emit(CHECKER_MEMORY_LEAK, line,
                          f"Memory leak: {struct_name}.{fname} "
                          f"(allocated at line {info.line})")
                info.status = "leaked"
            else:
                info.escaped = True

    def check_memory_leak_at(self, state: AbstractHeap, line: int) -> None:
        """Report blocks that just became unreachable on this path."""
        state.propagate_escapes()
        reachable = state.reachable_sites()
        for sid, info in state.sites.items():
            if info.status != "live" or info.escaped or sid in reachable:
                continue
            self.emit(CHECKER_MEMORY_LEAK, line,
                      f"memory dynamically allocated at line {info.line} "
                      f"is not reachable after line {line}")
            info.status = "leaked"

    def finish_path(self, state: AbstractHeap) -> None:
        self.paths_done += 1
        line = state.ret_line or self.fn.loc.line
        state.propagate_escapes()
        # Only globals survive the function; locals go out of scope.
        roots = [state.env[g] for g in self.global_names if g in state.env]
        reachable = state.reachable_sites(roots)
        for sid, info in state.sites.items():
            if info.status != "live" or info.escaped or sid in reachable:
                continue
            self.emit(CHECKER_MEMORY_LEAK, line,
                      f"memory dynamically allocated at line {info.line} "
                      f"is not reachable after line {line}")
            info.status = "leaked"

    def check_uninit_use(self, name: str, loc) -> None:
        self.emit(CHECKER_UNINIT_USE, loc.line,
                  f"variable `{name}` may be read before initialization")

    def check_dead_store(self) -> None:
        if self.incomplete:
            return  # unexplored paths could read the stores; stay quiet
        for (var, line), cls in sorted(self.stores.items()):
            if (var, line) in self.read_stores:
                continue
            if var in self.addr_taken or var in self.global_names:
                continue
            checker = CHECKER_DEAD_STORE_NULL_INIT if cls == "null-or-zero" \
                else CHECKER_DEAD_STORE
            self.emit(checker, line,
                      f"The value written to &{var} is never used")


def _collect_calls_in_fn(fn: ast.FunctionDef, out: set) -> None:
    for stmt in fn.body:
        _collect_calls(stmt, out)


def _collect_addr_taken_in_fn(fn: ast.FunctionDef, out: set) -> None:
    for stmt in fn.body:
        _collect_addr_taken(stmt, out)


def _is_null_expr(expr) -> bool:
    return isinstance(expr, ast.NullLit) or \
        (isinstance(expr, ast.IntLit) and expr.value == 0)


def _is_null_expr_value(value) -> bool:
    return (isinstance(value, PtrValue) and value.kind == "null"
            and value.origin == "literal") or \
        (isinstance(value, ScalarValue) and value.state == "zero")


def _literal_of(expr):
    if isinstance(expr, ast.IntLit):
        return expr.value
    return None


def _stmt_line(stmt) -> int:
    return stmt.loc.line


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def summarize_function(fn: ast.FunctionDef, cfg: Cfg,
                       config: CheckerConfig | None = None,
                       summaries: dict | None = None,
                       tu: ast.TranslationUnit | None = None) -> FunctionSummary:
    """Compute the depth-1 interprocedural summary for one function."""
    config = config or PROFILES["union"]
    if tu is None:
        tu = ast.TranslationUnit(
            ast.SourceUnit.from_text("<summary>", ""), [], [fn], [])
    fa = _FunctionAnalysis(tu, fn, cfg, config, summaries or {}, report=False)
    fa.run()
    pointer_returns = [(v, fresh) for v, fresh in fa.returns if v is not None]
    returns_fresh = any(fresh for _, fresh in pointer_returns)
    nulls = [v for v, _ in pointer_returns
             if isinstance(v, PtrValue) and v.kind == "null"]
    may_return_null = bool(nulls)
    returns_null_always = bool(pointer_returns) and \
        len(nulls) == len(pointer_returns)
    return FunctionSummary(
        name=fn.name,
        returns_fresh=returns_fresh,
        may_return_null=may_return_null,
        returns_null_always=returns_null_always,
        frees_params=frozenset(fa.frees_params),
        param_deref=frozenset(fa.param_deref),
    )


def compute_summaries(tu: ast.TranslationUnit, cfgs: dict,
                      config: CheckerConfig) -> dict:
    """Summaries in call-graph dependency order; recursion breaks to None."""
    summaries: dict[str, FunctionSummary] = {}
    in_progress: set[str] = set()
    by_name = {fn.name: fn for fn in tu.functions}

    def visit(name: str) -> None:
        if name in summaries or name in in_progress or name not in by_name:
            return
        in_progress.add(name)
        callees: set[str] = set()
        _collect_calls_in_fn(by_name[name], callees)
        for callee in sorted(callees):
            if callee not in ast.BUILTIN_FUNCTIONS:
                visit(callee)
        summaries[name] = summarize_function(
            by_name[name], cfgs[name], config, summaries, tu)
        in_progress.discard(name)

    for fn in tu.functions:
        visit(fn.name)
    return summaries


def analyze_unit(tu: ast.TranslationUnit, cfgs: dict | None = None,
                 config: CheckerConfig | None = None) -> AnalysisResult:
    """Run all enabled checkers over one translation unit.

    Returns findings sorted by (file, line, kind, checker); the result is
    marked incomplete when any function hit the path budget.
    """
    config = config or PROFILES["union"]
    if cfgs is None:
        cfgs = {fn.name: build_cfg(fn) for fn in tu.functions}
    summaries = compute_summaries(tu, cfgs, config)
    findings: set[Finding] = set()
    incomplete = False
    for fn in tu.functions:
        fa = _FunctionAnalysis(tu, fn, cfgs[fn.name], config, summaries,
                               report=True)
        fa.run()
        findings |= fa.findings
        incomplete = incomplete or fa.incomplete
    ordered = sorted(findings, key=lambda f: (
        f.file, f.line, f.kind, f.checker, f.message, f.function))
    return AnalysisResult(ordered, incomplete)
