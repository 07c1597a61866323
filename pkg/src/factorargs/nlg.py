"""Template rendering of ranked factor arguments.

Three modes: ``overview`` (evidence and conclusion only), ``direct`` (one
sentence per inference step), and ``contrastive`` (like direct, but
explaining-away steps get a counterfactual two-sentence form).  The canonical
output keeps ``<angle bracket>`` markup around node and state names;
:func:`strip_markup` yields the plain style.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .arguments import EffectEngine, FactorArgument, RankedFA, StepTrace, step_effect
from .errors import ValidationError
from .factors import BeliefUpdate, obs
from .network import BayesianNetwork, Evidence, FGNode, build_factor_graph

MODES = ("overview", "direct", "contrastive")

CAUSAL = "causal"
EVIDENTIAL = "evidential"
INTERCAUSAL = "intercausal"


@dataclass(frozen=True)
class StrengthQualifier:
    """Verbal strength label with its half-open log-odds range bounds."""

    label: str
    low: float
    high: float

    @property
    def word(self) -> str:
        return self.label.lower()


_QUALIFIERS = (
    StrengthQualifier("Certainly", 10.0, math.inf),
    StrengthQualifier("Strongly", 1.0, 10.0),
    StrengthQualifier("Moderately", 0.5, 1.0),
    StrengthQualifier("Weakly", 0.1, 0.5),
    StrengthQualifier("Tenuously", 0.0, 0.1),
)


def qualifier(range_: float) -> StrengthQualifier:
    """Map a log-odds update range to its verbal label (strict thresholds)."""
    if math.isnan(range_) or range_ < 0:
        raise ValidationError(f"log-odds range must be nonnegative, got {range_}")
    for q in _QUALIFIERS[:-1]:
        if range_ > q.low:
            return q
    return _QUALIFIERS[-1]


def logodds_range(update: BeliefUpdate) -> float:
    """Spread (max minus min) of the per-state log-odds of an update."""
    lv = update.logodds_vector()
    return float(lv.max() - lv.min())


def classify_step(
    bn: BayesianNetwork,
    fa: FactorArgument,
    factor_node: FGNode,
    conclusion: FGNode | None = None,
) -> str:
    """Reasoning pattern of one step: causal along the CPT's own arrow,
    intercausal when a co-parent premise joins in, evidential otherwise."""
    if conclusion is None:
        succs = fa.successors(factor_node)
        if len(succs) != 1:
            raise ValidationError(
                f"{factor_node} has {len(succs)} successors; pass the conclusion explicitly"
            )
        conclusion = succs[0]
    if conclusion.name == factor_node.name:
        return CAUSAL
    preds = fa.predecessors(factor_node)
    co_parents = [p for p in preds if p.name != factor_node.name]
    if co_parents and len(preds) >= 2:
        return INTERCAUSAL
    return EVIDENTIAL


def _counterfactual_from_trace(
    bn: BayesianNetwork, step: StepTrace, node_effects
) -> BeliefUpdate:
    child_name = step.factor.name
    if all(p.name != child_name for p in step.premises):
        raise ValidationError(
            f"step at {step.factor} has no premise on the factor's child; "
            f"no counterfactual exists"
        )
    premises = [obs(bn.var(child_name), node_effects[child_name].argued_state())]
    for p in step.premises:
        if p.name != child_name:
            premises.append(BeliefUpdate.uniform(bn.var(p.name)))
    return step_effect(bn.cpt(child_name), premises, bn.var(step.conclusion.name))


def counterfactual_effect(
    bn: BayesianNetwork,
    fa: FactorArgument,
    factor_node: FGNode,
    evidence: Evidence,
    conclusion: FGNode | None = None,
) -> BeliefUpdate:
    """What the step would conclude from the child's most likely state alone,
    with every co-parent premise made uninformative."""
    if classify_step(bn, fa, factor_node, conclusion) != INTERCAUSAL:
        raise ValidationError("counterfactual effects are defined for intercausal steps")
    engine = EffectEngine(build_factor_graph(bn), evidence)
    steps, node_effects = engine.trace(fa)
    for st in steps:
        if st.factor == factor_node and (conclusion is None or st.conclusion == conclusion):
            return _counterfactual_from_trace(bn, st, node_effects)
    raise ValidationError(f"{factor_node} is not a step of this argument")


@dataclass(frozen=True)
class ExplanationStep:
    premises: tuple[str, ...]
    verb: str
    conclusion: str
    qualifier: str
    pattern: str
    sentence: str


@dataclass(frozen=True)
class Explanation:
    mode: str
    steps: tuple[ExplanationStep, ...]
    text: str

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "steps": [
                {
                    "premises": list(s.premises),
                    "verb": s.verb,
                    "conclusion": s.conclusion,
                    "qualifier": s.qualifier,
                    "pattern": s.pattern,
                }
                for s in self.steps
            ],
            "text": self.text,
        }


def strip_markup(text: str) -> str:
    """Plain style: the canonical text without angle-bracket markup."""
    return text.replace("<", "").replace(">", "")


def _ordered_sources(fa: FactorArgument) -> list[FGNode]:
    # narrate from the farthest evidence inward; name breaks ties
    return sorted(fa.sources, key=lambda s: (-fa.source_hops(s), str(s)))


def _premise_order(premises, sources) -> list[FGNode]:
    inferred = sorted((p for p in premises if p not in sources), key=str)
    observed = sorted((p for p in premises if p in sources), key=str)
    return inferred + observed


def _rule_sort_key(step: StepTrace):
    return (-logodds_range(step.effect), str(step.factor))


def render(ranked: RankedFA, mode: str, bn: BayesianNetwork) -> Explanation:
    """Render one ranked argument in the requested mode."""
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
    fa = ranked.argument
    if not ranked.step_effects or not ranked.node_effects:
        raise ValidationError("the argument carries no step trace to render")

    node_effects = ranked.node_effects
    sources = fa.sources
    target = fa.target

    def state_of(node: FGNode) -> str:
        return node_effects[node.name].argued_state()

    ev_clauses = [f"<{s.name}> is <{state_of(s)}>" for s in _ordered_sources(fa)]

    if mode == "overview":
        text = (
            f"Since {' and '.join(ev_clauses)}, we infer that "
            f"<{target.name}> = <{ranked.argued_state}>."
        )
        return Explanation(mode=mode, steps=(), text=text)

    lines = [f"We have observed that {' and '.join(ev_clauses)}."]
    steps: list[ExplanationStep] = []

    by_conclusion: dict[FGNode, list[StepTrace]] = {}
    for st in ranked.step_effects:
        by_conclusion.setdefault(st.conclusion, []).append(st)

    for node in fa.topological_variables():
        if node in sources:
            continue
        rules = sorted(by_conclusion.get(node, []), key=_rule_sort_key)
        kind = "target" if node == target else "intermediate"
        for st in rules:
            pattern = classify_step(bn, fa, st.factor, st.conclusion)
            qual = qualifier(logodds_range(st.effect))
            premise_nodes = _premise_order(st.premises, sources)
            premise_texts = tuple(f"<{p.name}> = <{state_of(p)}>" for p in premise_nodes)
            concl_state = st.effect.argued_state()

            contrastive_here = (
                mode == "contrastive"
                and pattern == INTERCAUSAL
                and any(p.name == st.factor.name for p in st.premises)
            )
            if not contrastive_here:
                verb = "causes" if pattern == CAUSAL else "is evidence that"
                conclusion_text = (
                    f"the {kind} node <{node.name}> becomes {qual.word} "
                    f"more likely to be <{concl_state}>"
                )
                sentence = (
                    f"The updated probability of {' and '.join(premise_texts)} "
                    f"{verb} {conclusion_text}."
                )
                steps.append(
                    ExplanationStep(
                        premises=premise_texts,
                        verb=verb,
                        conclusion=conclusion_text,
                        qualifier=qual.label,
                        pattern=pattern,
                        sentence=sentence,
                    )
                )
                lines.append(sentence)
                continue

            # contrastive intercausal: counterfactual vs factual
            child_name = st.factor.name
            child_state = node_effects[child_name].argued_state()
            counterfactual = _counterfactual_from_trace(bn, st, node_effects)
            cf_state = counterfactual.argued_state()
            factual_state = concl_state
            usual = (
                f"Usually, if the <{child_name}> = <{child_state}> then the "
                f"<{node.name}> = <{cf_state}>."
            )
            co_parents = [p for p in _premise_order(st.premises, sources) if p.name != child_name]
            co_texts = [f"the <{p.name}> is <{state_of(p)}>" for p in co_parents]
            if cf_state != factual_state:
                verb = "infer"
                factual = (
                    f"Since {' and '.join(co_texts)}, we infer that "
                    f"<{node.name}> = <{factual_state}> instead."
                )
            else:
                lf = st.effect.logodds_vector()[st.effect.variable.index(factual_state)]
                lc = counterfactual.logodds_vector()[
                    counterfactual.variable.index(factual_state)
                ]
                verb = "can" if lf > lc else "can not"
                factual = (
                    f"Since {' and '.join(co_texts)}, we {verb} be {qual.word} "
                    f"more certain that <{node.name}> = <{factual_state}>."
                )
            sentence = f"{usual}\n{factual}"
            steps.append(
                ExplanationStep(
                    premises=premise_texts,
                    verb=verb,
                    conclusion=f"<{node.name}> = <{factual_state}>",
                    qualifier=qual.label,
                    pattern=INTERCAUSAL,
                    sentence=sentence,
                )
            )
            lines.append(sentence)

        if len(rules) > 1:
            cum = node_effects[node.name]
            qual = qualifier(logodds_range(cum))
            sentence = (
                f"All in all, the {kind} node <{node.name}> becomes "
                f"{qual.word} more likely to be <{cum.argued_state()}>."
            )
            steps.append(
                ExplanationStep(
                    premises=(),
                    verb="",
                    conclusion=sentence,
                    qualifier=qual.label,
                    pattern="cumulative",
                    sentence=sentence,
                )
            )
            lines.append(sentence)

    return Explanation(mode=mode, steps=tuple(steps), text="\n".join(lines))


def render_baseline_summary(prior: BeliefUpdate, posterior: BeliefUpdate) -> str:
    """One sentence stating how the argued state's probability moved."""
    if prior.variable.name != posterior.variable.name:
        raise ValidationError("prior and posterior must cover the same variable")
    diffs = [abs(a - b) for a, b in zip(posterior.values, prior.values)]
    idx = max(range(len(diffs)), key=lambda i: (diffs[i], -i))
    state = prior.variable.states[idx]
    p0 = f"{prior.values[idx] * 100:.0f}"
    p1 = f"{posterior.values[idx] * 100:.0f}"
    name = prior.variable.name
    if p0 == p1:
        return f"The probability of <{name}> = <{state}> remains {p0}%."
    return f"The probability of <{name}> = <{state}> changed from {p0}% to {p1}%."
