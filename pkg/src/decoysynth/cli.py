"""Command-line front end.

Exit status: 0 success, 1 usage error, 2 model error, 3 state cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from pathlib import Path

from . import dot
from .arena import P1, P2, Arena, parse_owner, save_arena, validate_arena
from .dynamic import build_dynamic_hypergame, known_monotone, region_statistics, solve_repeated
from .errors import CapExceeded, ModelError
from .fixtures import BUNDLED, load_bundled
from .hypergame import Synthesis, synthesize
from .logic import DEFAULT_DFA_CAP, load_dfa, parse_scltl, render, save_dfa, translate_to_dfa
from .netmodel import DEFAULT_STATE_CAP, compile_arena, load_network
from .product import build_product
from .random_models import random_arena, random_formula
from .solver import positional_strategy, sure_winning_regions


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# -- inputs -----------------------------------------------------------------

def load_model(spec: str, cap: int = DEFAULT_STATE_CAP):
    """Arena plus the network objectives (if any) for a bundled name or a JSON path."""
    if spec in BUNDLED:
        doc = load_bundled(spec)
    else:
        try:
            doc = json.loads(Path(spec).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ModelError(f"cannot read model {spec!r}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ModelError(f"{spec}: not valid JSON: {exc}") from None
    if isinstance(doc, dict) and "hosts" in doc:
        model = load_network(doc)
        return compile_arena(model, cap), dict(model.objectives)
    return Arena.from_dict(doc), {}


def resolve_objective(args, objectives):
    """Formula text and owner from flags, falling back to the network's objectives."""
    owner = parse_owner(args.owner) if args.owner else None
    if args.formula:
        return args.formula, owner if owner is not None else P1
    if getattr(args, "dfa", None):
        return None, owner if owner is not None else P1
    if owner in (None, P1) and "defender" in objectives:
        return objectives["defender"], P1
    if owner in (None, P2) and "attacker" in objectives:
        return objectives["attacker"], P2
    raise UsageError("an objective is required: pass --formula or --dfa")


def objective_dfa(args, formula, arena=None):
    if formula is None:
        return load_dfa(args.dfa)
    f = parse_scltl(formula)
    return translate_to_dfa(f, cap=getattr(args, "cap_dfa", DEFAULT_DFA_CAP))


def write_json(path, doc):
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def _named(game, strategy):
    return {game.state_name(s): game.action_names[a] for s, a in sorted(strategy.choice.items())}


# -- subcommands -------------------------------------------------------------

def cmd_translate(args):
    f = parse_scltl(args.formula)
    dfa = translate_to_dfa(f, ap=args.ap.split(",") if args.ap else None, cap=args.cap_dfa)
    print(f"formula: {render(f)}")
    sink = dfa.sink
    print(f"states: {len(dfa.states)} ({len(dfa.states) - (sink is not None)} non-sink), "
          f"accepting: {', '.join(dfa.states[q] for q in sorted(dfa.finals)) or 'none'}")
    for q, name in enumerate(dfa.states):
        tags = [t for t, on in (("initial", q == dfa.initial), ("accepting", q in dfa.finals),
                                ("sink", q == sink)) if on]
        print(f"  {name} [{render(dfa.formulas[q])}]" + (f" ({', '.join(tags)})" if tags else ""))
        moves = {}
        for m, t in enumerate(dfa.delta[q]):
            moves.setdefault(t, []).append("{" + ",".join(sorted(dfa.letter(m))) + "}")
        for t, letters in sorted(moves.items()):
            print(f"    -> {dfa.states[t]} on {' '.join(letters)}")
    if args.out:
        save_dfa(dfa, args.out)
    if args.dot:
        Path(args.dot).write_text(_dfa_dot(dfa), encoding="utf-8")
    return 0


def _dfa_dot(dfa):
    lines = ["digraph dfa {", "  rankdir=LR;"]
    for q, name in enumerate(dfa.states):
        shape = "doublecircle" if q in dfa.finals else "circle"
        lines.append(f'  {name} [shape={shape}{", penwidth=2" if q == dfa.initial else ""}];')
    for q, row in enumerate(dfa.delta):
        moves = {}
        for m, t in enumerate(row):
            moves.setdefault(t, []).append("{" + ",".join(sorted(dfa.letter(m))) + "}")
        for t, letters in sorted(moves.items()):
            lines.append(f'  {dfa.states[q]} -> {dfa.states[t]} [label="{" ".join(letters)}"];')
    return "\n".join(lines + ["}"]) + "\n"


def cmd_solve(args):
    arena, objectives = load_model(args.model, args.cap_states)
    formula, owner = resolve_objective(args, objectives)
    dfa = objective_dfa(args, formula)
    game = build_product(arena, dfa, args.perspective)
    analysis = sure_winning_regions(game, owner, game.final)
    win1, win2 = analysis.region(P1), analysis.region(P2)
    print(f"objective ({'defender' if owner == P1 else 'attacker'}): {formula or args.dfa}")
    print(f"perspective: {game.perspective}")
    print(f"product states: {game.num_states}")
    print(f"defender winning region: {len(win1)} states")
    print(f"attacker winning region: {len(win2)} states")
    print(f"initial state won by: {'defender' if game.initial in win1 else 'attacker'}")
    if args.out:
        write_json(args.out, {
            "objective": formula, "owner": f"P{owner}", "perspective": game.perspective,
            "defender_region": sorted(game.state_name(s) for s in win1),
            "attacker_region": sorted(game.state_name(s) for s in win2),
            "defender_strategy": _named(game, positional_strategy(analysis, P1)),
            "attacker_strategy": _named(game, positional_strategy(analysis, P2)),
        })
    if args.dot:
        strategy = positional_strategy(analysis, owner)
        Path(args.dot).write_text(dot.product_dot(game, analysis, strategy), encoding="utf-8")
    return 0


def _synthesis(args):
    arena, objectives = load_model(args.model, args.cap_states)
    formula, owner = resolve_objective(args, objectives)
    dfa = objective_dfa(args, formula)
    return synthesize(arena, dfa, owner), formula


def cmd_synth(args):
    syn, formula = _synthesis(args)
    summary = syn.summary()
    hg = syn.hg
    print(f"objective ({'defender' if hg.objective_owner == P1 else 'attacker'}): {formula or args.dfa}")
    print(f"hypergame states: {summary['hypergame_states']} ({summary['divergent_states']} divergent)")
    print(f"symmetric-information defender winning region: {summary['symmetric_defender_region']} states")
    print(f"deceptive defender winning region: {summary['deceptive_defender_region']} hypergame states, "
          f"{summary['deceptive_region_projected']} projected states")
    print(f"initial state perceived winning by the attacker: "
          f"{'yes' if summary['initial_perceived_attacker_winning'] else 'no'}")
    print(f"initial state deceptively sure-winning for the defender: "
          f"{'yes' if summary['initial_deceptive_winning'] else 'no'}")
    report = syn.stealth_report()
    print(f"stealth violations: {len(report)}")
    for v in report:
        print(f"  {v.describe(hg)}")
    if args.out:
        write_json(args.out, {
            "objective": formula,
            "summary": summary,
            "deceptive_strategy": _named(hg, syn.result.strategy),
            "classical_strategy": _named(syn.g1, positional_strategy(syn.analysis1, P1)),
            "stealth_violations": [v.describe(hg) for v in report],
        })
    if args.dot:
        Path(args.dot).write_text(dot.hypergame_dot(hg, syn.result), encoding="utf-8")
    return 0


def cmd_dynamic(args):
    arena, objectives = load_model(args.model, args.cap_states)
    formula, owner = resolve_objective(args, objectives)
    dfa = objective_dfa(args, formula)
    dyn = build_dynamic_hypergame(arena, dfa, objective_owner=owner, cap=args.cap_states)
    result = solve_repeated(dyn)
    rows = region_statistics(dyn, result)
    print(f"decoy hosts: {sorted(dyn.family.decoys)} ({dyn.family.size} attacker labelings)")
    print(f"dynamic hypergame states: {dyn.num_states} ({len(dyn.restarts)} restart states)")
    for row in rows:
        print(f"  D={row['known_decoys']}: {row['states']} states, defender region {row['defender_region']}, "
              f"perceived attacker region {row['perceived_attacker_region']}")
    print(f"known-decoy set monotone: {'yes' if not known_monotone(dyn) else 'no'}")
    verdict = "secure" if dyn.initial in result.region else "not secure"
    print(f"repeated interaction from the initial state: {verdict}")
    if args.out:
        write_json(args.out, {"objective": formula, "rounds": rows, "verdict": verdict,
                              "defender_strategy": _named(dyn, result.strategy)})
    return 0


def cmd_compile(args):
    if args.model in BUNDLED:
        doc = load_bundled(args.model)
    else:
        doc = args.model
    arena = compile_arena(load_network(doc), args.cap_states)
    problems = validate_arena(arena)
    print(f"compiled arena: {len(arena.states)} states, {len(arena.actions)} actions, "
          f"{len(arena.transitions)} transitions")
    for p in problems:
        print(f"  {p}")
    if args.out:
        save_arena(arena, args.out)
    return 0 if not problems else 2


def cmd_export_dot(args):
    arena, objectives = load_model(args.model, args.cap_states)
    if args.kind == "arena":
        text = dot.arena_dot(arena, args.perspective)
    else:
        formula, owner = resolve_objective(args, objectives)
        dfa = objective_dfa(args, formula)
        if args.kind == "product":
            game = build_product(arena, dfa, args.perspective)
            analysis = sure_winning_regions(game, owner, game.final)
            text = dot.product_dot(game, analysis, positional_strategy(analysis, owner))
        else:
            syn = synthesize(arena, dfa, owner)
            text = dot.hypergame_dot(syn.hg, syn.result)
    Path(args.out).write_text(text, encoding="utf-8")
    print(f"wrote {args.out}")
    return 0


def cmd_stats(args):
    rng = random.Random(args.seed)
    print(f"seed {args.seed}: {args.count} random games")
    started = time.perf_counter()
    total = 0
    for k in range(args.count):
        arena = random_arena(rng, max_states=args.max_states)
        f = random_formula(rng, 8, ("a", "b", "c"))
        dfa = translate_to_dfa(f, ap=("a", "b", "c"))
        game = build_product(arena, dfa)
        analysis = sure_winning_regions(game, P2, game.final)
        total += game.num_states
        print(f"  #{k}: {render(f)}: {game.num_states} product states, "
              f"reach {len(analysis.win_reach)}, safe {len(analysis.win_safe)}")
    print(f"total product states {total} in {time.perf_counter() - started:.2f}s")
    return 0


# -- interactive play-out ------------------------------------------------------

def step_session(syn: Synthesis, human_role: str, stdin=None, stdout=None,
                 filtered: bool = False, max_steps: int = 200) -> list[dict]:
    """Play the synthesized strategy against a human over text streams.

    The human picks actions by name or number; the tool plays the other
    side: the deceptive defender strategy, or the attacker's
    perceived-rational strategy.  Returns the transcript.
    """
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    hg, g1, g2 = syn.hg, syn.g1, syn.g2
    arena, dfa = g1.arena, g1.dfa
    human = P1 if human_role == "defender" else P2
    classical = positional_strategy(syn.analysis1, P1)
    perceived_attack = positional_strategy(syn.analysis2, P2)
    pi2 = hg.perceived
    true_decoy = [("decoy" in lab) for lab in arena.labeling("true")]
    say = lambda text: print(text, file=stdout)

    transcript = []
    triple = hg.states[hg.initial]
    if human == P1 and hg.initial not in syn.result.region and g1.initial not in syn.win1:
        say("out of region: the defender has no sure-winning strategy from the initial state")
    for step in range(max_steps):
        s, q, p = triple
        node = hg.index[triple]
        say(f"[{step}] {hg.state_name(node)}" + (" (divergent)" if q != p else ""))
        outcome = _outcome(dfa, q, hg.objective_owner, true_decoy[s])
        if outcome:
            say(outcome)
            break
        owner = arena.owners[s]
        options = list(arena.enabled(s))
        if owner == human:
            if filtered and human == P2:
                options = pi2.enabled(s, p, P2, options)
            say("  actions: " + ", ".join(f"{i}:{arena.actions[a]}" for i, (a, _) in enumerate(options)))
            choice = _prompt(options, arena, stdin, stdout)
            if choice is None:
                break
        else:
            choice = _tool_move(syn, node, s, q, p, owner, classical, perceived_attack, options)
            if choice is None:
                say("  out of region: playing the first enabled action")
                choice = options[0]
            say(f"  tool plays {arena.actions[choice[0]]}")
        a, t = choice
        transcript.append({"step": step, "state": hg.state_name(node), "player": f"P{owner}",
                           "action": arena.actions[a], "divergent": q != p})
        triple = (t, dfa.delta[q][dfa.mask(arena.labeling(g1.perspective)[t])],
                  dfa.delta[p][dfa.mask(arena.labeling(g2.perspective)[t])])
    return transcript


def _outcome(dfa, q, owner, at_decoy):
    who = "defender" if owner == P1 else "attacker"
    prefix = "decoy reached: " if at_decoy else ""
    if q in dfa.finals:
        return f"{prefix}{who} objective satisfied"
    if q == dfa.sink:
        return f"{prefix}{who} objective violated"
    return None


def _tool_move(syn, node, s, q, p, owner, classical, perceived_attack, options):
    g1, g2, hg = syn.g1, syn.g2, syn.hg
    by_action = dict(options)
    if owner == P1:
        pair = g1.index[(s, q)]
        a = classical.get(pair) if pair in syn.win1 else syn.result.strategy.get(node)
    else:
        a = perceived_attack.get(g2.index[(s, p)])
    if a is None or a not in by_action:
        return None
    return a, by_action[a]


def _prompt(options, arena, stdin, stdout):
    names = {arena.actions[a]: (a, t) for a, t in options}
    while True:
        print("> ", end="", file=stdout, flush=True)
        line = stdin.readline()
        if not line:
            return None
        text = line.strip()
        if text.isdigit() and int(text) < len(options):
            return options[int(text)]
        if text in names:
            return names[text]
        print(f"  invalid action {text!r}", file=stdout)


def cmd_simulate(args):
    syn, _ = _synthesis(args)
    transcript = step_session(syn, args.role, filtered=args.filtered, max_steps=args.max_steps)
    if args.out:
        write_json(args.out, transcript)
    return 0


# -- entry point -----------------------------------------------------------------

def _positive(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="decoysynth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def model_command(name, helptext, objective=True):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("model", help=f"arena or network JSON, or a bundled name ({', '.join(sorted(BUNDLED))})")
        p.add_argument("--cap-states", type=_positive, default=DEFAULT_STATE_CAP)
        if objective:
            p.add_argument("--formula", help="co-safe LTL objective")
            p.add_argument("--dfa", help="explicit DFA JSON instead of --formula")
            p.add_argument("--owner", choices=["P1", "P2"], help="player owning the objective (default P1)")
            p.add_argument("--cap-dfa", type=_positive, default=DEFAULT_DFA_CAP)
        return p

    p = sub.add_parser("translate", help="translate a formula to its DFA")
    p.add_argument("formula")
    p.add_argument("--ap", help="comma-separated alphabet (default: the formula's propositions)")
    p.add_argument("--out")
    p.add_argument("--dot")
    p.add_argument("--cap-dfa", type=_positive, default=DEFAULT_DFA_CAP)
    p.set_defaults(func=cmd_translate)

    p = model_command("solve", "symmetric-information winning regions")
    p.add_argument("--perspective", default="true")
    p.add_argument("--out")
    p.add_argument("--dot")
    p.set_defaults(func=cmd_solve)

    p = model_command("synth", "deceptive sure-winning defender strategy")
    p.add_argument("--out")
    p.add_argument("--dot")
    p.set_defaults(func=cmd_synth)

    p = model_command("dynamic", "repeated interaction with decoy learning")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dynamic)

    p = model_command("compile", "compile a network document to an arena", objective=False)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compile)

    p = model_command("simulate", "play the synthesized strategy interactively")
    p.add_argument("--role", choices=["attacker", "defender"], default="attacker",
                   help="side played by the human")
    p.add_argument("--filtered", action="store_true", help="offer only perceived-rational attacker moves")
    p.add_argument("--max-steps", type=_positive, default=200)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = model_command("export-dot", "write a DOT rendering")
    p.add_argument("--kind", choices=["arena", "product", "hypergame"], default="arena")
    p.add_argument("--perspective", default="true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("stats", help="solve seeded random games and report sizes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=_positive, default=10)
    p.add_argument("--max-states", type=_positive, default=200)
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"decoysynth: error: {exc}", file=sys.stderr)
        return 1
    except CapExceeded as exc:
        print(f"decoysynth: cap exceeded: {exc}", file=sys.stderr)
        return 3
    except ModelError as exc:
        print(f"decoysynth: model error: {exc}", file=sys.stderr)
        return 2
    except KeyError as exc:
        print(f"decoysynth: model error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
