/*
 *  This program is free software; you can redistribute it and/or
 *  modify it under the terms of the Apache License, Version 2.0.
 *
 *  Copyright:
 *     2026, The cgchr authors
 *
 *     Licensed under the Apache License, Version 2.0 (the "License");
 *     you may not use this file except in compliance with the License.
 *     You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *     Unless required by applicable law or agreed to in writing, software
 *     distributed under the License is distributed on an "AS IS" BASIS,
 *     WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *     See the License for the specific language governing permissions and
 *     limitations under the License.
 *
 */

#include <chr/verify.hh>
#include <chr/concurrent.hh>

#include <algorithm>

namespace chr
{
	std::string to_string(const Verdict& v)
	{
		std::string s = (v.passed ? "PASS " : "FAIL ") + v.check;
		if (!v.detail.empty()) s += ": " + v.detail;
		return s;
	}

	std::vector< Constraint > no_ids(std::span< const Goal > goals)
	{
		std::vector< Constraint > out;
		for (const auto& g : goals)
			if (!g.numbered()) out.push_back(g.constraint);
		return out;
	}

	namespace
	{
		// Tags for un-numbered goals in a projection, far above any store id.
		constexpr Id goal_tag_base = Id{1} << 48;

		AbstractStore store_projection(const Store& s, const History& h)
		{
			AbstractStore a;
			for (Id id : s.alive_ids())
				a.add_tagged(s.get(id), id);
			for (const auto& e : s.equations())
				a.add(e);
			a.history = h;
			return a;
		}

		std::string ids_text(const std::vector< Id >& v)
		{
			std::string s = "{";
			for (std::size_t i = 0; i < v.size(); ++i)
				s += (i ? "," : "") + std::to_string(v[i]);
			return s + "}";
		}

		bool has_rule_vars(const Term& t, std::uint32_t scope)
		{
			std::set< Var > vs;
			collect_vars(t, vs);
			return std::any_of(vs.begin(), vs.end(), [scope](const Var& v) { return v.scope == scope; });
		}
	}

	ReplayState::ReplayState(const Program& p, std::span< const Constraint > goals)
		: _p(p)
	{
		for (const auto& g : goals)
			_goals.push_back(Goal{simplify_ground(g), 0});
	}

	bool ReplayState::take_goal(const Goal& g)
	{
		auto it = std::find_if(_goals.begin(), _goals.end(), [&g](const Goal& x) {
			if (g.numbered()) return x.id == g.id;
			return !x.numbered() && x.constraint == g.constraint;
		});
		if (it == _goals.end()) return false;
		_goals.erase(it);
		return true;
	}

	std::optional< std::string > ReplayState::apply(const TraceStep& step)
	{
		switch (step.kind)
		{
			case StepKind::Activate:
			{
				if (!step.goal || !is_chr(*step.goal)) return "Activate without a CHR goal";
				if (!step.propagated.empty() || !step.simplified.empty()) return "Activate with a side effect";
				if (!take_goal(Goal{*step.goal, 0})) return "goal " + to_string(*step.goal) + " not pending";
				if (step.id == 0 || _store.known(step.id)) return "id #" + std::to_string(step.id) + " is not fresh";
				_store.insert_with_id(std::get< Chr >(*step.goal), step.id);
				_goals.push_back(Goal{_store.get(step.id), step.id});
				return std::nullopt;
			}
			case StepKind::Solve:
			{
				if (!step.goal || !is_equation(*step.goal)) return "Solve without an equation";
				if (!step.simplified.empty()) return "Solve with simplified constraints";
				if (!take_goal(Goal{*step.goal, 0})) return "goal " + to_string(*step.goal) + " not pending";
				auto solved = _store.add_equation(std::get< Equation >(*step.goal));
				if (solved.woken != step.propagated)
					return "woken set " + ids_text(step.propagated) + " differs from " + ids_text(solved.woken);
				for (Id id : solved.woken)
					_goals.push_back(Goal{_store.get(id), id});
				return std::nullopt;
			}
			case StepKind::Drop:
			{
				if (!step.propagated.empty() || !step.simplified.empty()) return "Drop with a side effect";
				if (!take_goal(Goal{Chr{}, step.id})) return "goal #" + std::to_string(step.id) + " not pending";
				if (!_store.alive(step.id)) return std::nullopt;
				for (const auto& inst : instances(store_projection(_store, _history), _p))
				{
					if (std::find(inst.tags.begin(), inst.tags.end(), step.id) == inst.tags.end()) continue;
					const Rule& r = _p.rules[inst.rule];
					// A kept position already fired from is not applicable any more.
					bool blocked = true;
					for (std::size_t k = 0; k < inst.tags.size(); ++k)
						if (inst.tags[k] == step.id && (r.role(k) == Role::Simplified || !_history.count({inst.rule, history_key(inst.tags)})))
							blocked = false;
					if (!blocked)
						return "goal #" + std::to_string(step.id) + " dropped although rule " + r.name + " applies";
				}
				return std::nullopt;
			}
			case StepKind::Simplify:
			case StepKind::Propagate:
			{
				std::size_t ri = _p.rule_index(step.rule);
				if (ri == _p.rules.size()) return "unknown rule " + step.rule;
				const Rule& r = _p.rules[ri];
				if (step.heads.size() != r.head_count()) return "wrong number of heads";
				if (std::find_if(_goals.begin(), _goals.end(), [&](const Goal& g) { return g.id == step.id; }) == _goals.end())
					return "goal #" + std::to_string(step.id) + " not pending";
				Role wanted = step.kind == StepKind::Simplify ? Role::Simplified : Role::Propagated;
				bool placed = false;
				for (std::size_t k = 0; k < r.head_count(); ++k)
					placed = placed || (step.heads[k] == step.id && r.role(k) == wanted);
				if (!placed) return "goal #" + std::to_string(step.id) + " is not a " + (wanted == Role::Simplified ? "simplified" : "kept") + " head";

				for (std::size_t k = 0; k < step.heads.size(); ++k)
				{
					Id id = step.heads[k];
					if (!_store.alive(id)) return "head #" + std::to_string(id) + " is not alive";
					for (std::size_t j = 0; j < k; ++j)
						if (step.heads[j] == id) return "head #" + std::to_string(id) + " used twice";
					Chr inst = normalize(_store.theta(), chr::apply(step.phi, r.head(k)));
					for (const auto& a : inst.args)
						if (has_rule_vars(a, r.scope)) return "substitution leaves head " + std::to_string(k) + " unbound";
					if (inst != _store.get(id))
						return "head " + to_string(inst) + " does not match " + to_string(_store.get(id)) + "#" + std::to_string(id);
				}
				if (!entails_solved(_store.theta(), step.phi, r.guard)) return "guard not entailed";

				std::vector< Id > kept(step.heads.begin(), step.heads.begin() + static_cast< std::ptrdiff_t >(r.propagated.size()));
				std::vector< Id > removed(step.heads.begin() + static_cast< std::ptrdiff_t >(r.propagated.size()), step.heads.end());
				if (history_key(kept) != step.propagated || history_key(removed) != step.simplified)
					return "recorded side effect does not match the heads";
				auto key = std::make_pair(ri, history_key(step.heads));
				if (step.kind == StepKind::Propagate)
				{
					if (_history.count(key)) return "propagation instance fired twice";
					_history.insert(key);
				}
				_store.kill(removed);
				if (step.kind == StepKind::Simplify)
					take_goal(Goal{Chr{}, step.id});
				for (const auto& b : r.body)
					_goals.push_back(Goal{simplify_ground(chr::apply(step.phi, b)), 0});
				return std::nullopt;
			}
		}
		return "unknown step";
	}

	AbstractStore ReplayState::projection() const
	{
		AbstractStore a = store_projection(_store, _history);
		Id tag = goal_tag_base;
		for (const auto& c : no_ids(_goals))
		{
			if (is_chr(c)) a.add_tagged(c, tag++);
			else a.add(c);
		}
		return a;
	}

	namespace
	{
		// Runs the replay; on success leaves the final state in st.
		Verdict run_replay(const Trace& t, const Program& p, ReplayState& st, const char* check)
		{
			std::uint64_t expected = 1;
			for (const auto& step : t.steps)
			{
				if (step.seq != expected)
					return Verdict::fail(check, "step " + std::to_string(step.seq) + ": expected seq " + std::to_string(expected));
				++expected;
				if (auto err = st.apply(step))
					return Verdict::fail(check, "step " + std::to_string(step.seq) + " (" + to_string(step.kind) + "): " + *err);
				if (st.store().inconsistent() && &step != &t.steps.back())
					return Verdict::fail(check, "steps recorded after the equations became inconsistent");
			}
			(void)p;
			return Verdict::ok(check);
		}
	}

	Verdict replay(const Trace& t, std::span< const Constraint > goals, const Program& p)
	{
		ReplayState st(p, goals);
		Verdict v = run_replay(t, p, st, "replay");
		if (!v.passed) return v;
		if (st.store().dump() != t.final_store)
			return Verdict::fail("replay", "final store differs:\n" + st.store().dump() + "versus recorded\n" + t.final_store);
		if (t.status == Status::Done && !st.goals().empty())
			return Verdict::fail("replay", "status done but " + std::to_string(st.goals().size()) + " goals remain");
		if (t.status == Status::Failed && !st.store().inconsistent())
			return Verdict::fail("replay", "status failed but the equations are consistent");
		return v;
	}

	Verdict project_abstract(const Trace& t, std::span< const Constraint > goals, const Program& p)
	{
		const char* check = "project_abstract";
		ReplayState st(p, goals);
		for (const auto& step : t.steps)
		{
			AbstractStore before = st.projection();
			if (auto err = st.apply(step))
				return Verdict::fail(check, "step " + std::to_string(step.seq) + " not replayable: " + *err);
			AbstractStore after = st.projection();
			std::string got = after.canonical();
			if (step.is_firing())
			{
				std::size_t ri = p.rule_index(step.rule);
				auto next = apply_rule_instance(before, p, ri, step.phi, step.heads);
				if (!next)
					return Verdict::fail(check, "step " + std::to_string(step.seq) + ": " + step.rule + " is not an abstract rewrite of " + before.canonical());
				if (next->canonical() != got)
					return Verdict::fail(check, "step " + std::to_string(step.seq) + ": expected " + next->canonical() + " got " + got);
			}
			else if (before.canonical() != got)
				return Verdict::fail(check, "step " + std::to_string(step.seq) + " changed the projection from " + before.canonical() + " to " + got);
		}
		return Verdict::ok(check);
	}

	Verdict check_final(std::span< const Goal > goals, const Store& store, const History& history, const Program& p)
	{
		const char* check = "check_final";
		if (!goals.empty())
			return Verdict::fail(check, std::to_string(goals.size()) + " goals remain");
		auto inst = instances(store_projection(store, history), p);
		if (!inst.empty())
		{
			std::string d = "rule " + p.rules[inst[0].rule].name + " still applies to";
			for (Id id : inst[0].tags)
				d += " " + to_string(store.get(id)) + "#" + std::to_string(id);
			return Verdict::fail(check, d);
		}
		return Verdict::ok(check);
	}

	Verdict check_final(const Trace& t, std::span< const Constraint > goals, const Program& p)
	{
		ReplayState st(p, goals);
		Verdict v = run_replay(t, p, st, "check_final");
		if (!v.passed) return v;
		return check_final(st.goals(), st.store(), st.history(), p);
	}

	Verdict audit_overlap(const Trace& t)
	{
		auto d = decompose_k(t.steps);
		if (!d.ok) return Verdict::fail("audit_overlap", d.detail);
		return Verdict::ok("audit_overlap");
	}

	Verdict check_active_instances(std::span< const Goal > goals, const Store& store, const History& history, const Program& p)
	{
		for (const auto& inst : instances(store_projection(store, history), p))
		{
			bool active = std::any_of(inst.tags.begin(), inst.tags.end(), [&](Id id) {
				return std::any_of(goals.begin(), goals.end(), [id](const Goal& g) { return g.id == id; });
			});
			if (!active)
			{
				std::string d = "instance of " + p.rules[inst.rule].name + " with no goal:";
				for (Id id : inst.tags)
					d += " #" + std::to_string(id);
				return Verdict::fail("active_instances", d);
			}
		}
		return Verdict::ok("active_instances");
	}

	std::vector< Verdict > verify_trace(const Trace& t, std::span< const Constraint > goals, const Program& p)
	{
		std::vector< Verdict > out;
		out.push_back(replay(t, goals, p));
		out.push_back(project_abstract(t, goals, p));
		out.push_back(audit_overlap(t));
		if (t.status == Status::Done)
			out.push_back(check_final(t, goals, p));
		return out;
	}
}
