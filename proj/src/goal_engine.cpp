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

#include <chr/goal_engine.hh>

#include <algorithm>

namespace chr
{
	std::string to_string(const Goal& g)
	{
		if (g.numbered())
			return to_string(g.constraint) + "#" + std::to_string(g.id);
		return to_string(g.constraint);
	}

	GoalEngine::GoalEngine(const Program& p, Policy policy)
		: _p(p), _policy(policy)
	{ }

	void GoalEngine::add_goals(std::span< const Constraint > goals)
	{
		for (const auto& g : goals)
			_goals.push_back(Goal{g, 0});
	}

	void GoalEngine::push_new(std::vector< Goal > gs)
	{
		if (_policy == Policy::Fifo)
			_goals.insert(_goals.end(), std::make_move_iterator(gs.begin()), std::make_move_iterator(gs.end()));
		else
			_goals.insert(_goals.begin(), std::make_move_iterator(gs.begin()), std::make_move_iterator(gs.end()));
	}

	bool GoalEngine::step()
	{
		if (_goals.empty()) return false;
		Goal g = std::move(_goals.front());
		_goals.pop_front();
		if (g.numbered())
			execute_goal(g.id);
		else if (const auto* e = std::get_if< Equation >(&g.constraint))
			step_solve(*e);
		else
			step_activate(std::get< Chr >(g.constraint));
		return true;
	}

	void GoalEngine::step_solve(const Equation& e)
	{
		auto solved = _store.add_equation(e);
		TraceStep t;
		t.seq = _trace.size() + 1;
		t.kind = StepKind::Solve;
		t.goal = e;
		t.propagated = solved.woken;
		_trace.push_back(std::move(t));

		std::vector< Goal > woken;
		for (Id id : solved.woken)
			woken.push_back(Goal{_store.get(id), id});
		push_new(std::move(woken));
	}

	void GoalEngine::step_activate(const Chr& c)
	{
		Id id = _store.insert(c);
		TraceStep t;
		t.seq = _trace.size() + 1;
		t.kind = StepKind::Activate;
		t.goal = c;
		t.id = id;
		_trace.push_back(std::move(t));
		_goals.push_front(Goal{_store.get(id), id});
	}

	void GoalEngine::execute_goal(Id id)
	{
		TraceStep t;
		t.seq = _trace.size() + 1;
		t.id = id;

		std::optional< Firing > f;
		if (_store.alive(id))
			f = find_firing(_p, _store, id, [this](std::size_t rule, const std::vector< Id >& key) {
				return _history.count({rule, key}) > 0;
			});
		if (!f)
		{
			t.kind = StepKind::Drop;
			_trace.push_back(std::move(t));
			return;
		}

		const Rule& r = _p.rules[f->rule];
		Goal self{_store.get(id), id};
		auto kept = f->propagated_ids(r);
		auto removed = f->simplified_ids(r);
		_store.kill(removed);
		if (f->role == Role::Propagated)
			_history.insert({f->rule, history_key(f->heads)});

		t.kind = f->role == Role::Simplified ? StepKind::Simplify : StepKind::Propagate;
		t.rule = r.name;
		t.propagated = history_key(kept);
		t.simplified = history_key(removed);
		t.heads = f->heads;
		t.phi = f->phi;
		_trace.push_back(std::move(t));

		std::vector< Goal > body;
		for (auto& b : instantiate_body(r, f->phi))
			body.push_back(Goal{std::move(b), 0});

		if (f->role == Role::Simplified)
			push_new(std::move(body));
		else if (_policy == Policy::Fifo)
		{
			push_new(std::move(body));
			_goals.push_front(std::move(self));
		}
		else
		{
			_goals.push_front(std::move(self));
			push_new(std::move(body));
		}
	}

	RunResult GoalEngine::finish(Status status) &&
	{
		RunResult r;
		r.trace.engine = "sequential";
		r.trace.workers = 1;
		r.trace.steps = std::move(_trace);
		r.trace.status = status;
		r.trace.final_store = _store.dump();
		r.status = status;
		r.goals.assign(_goals.begin(), _goals.end());
		r.history = std::move(_history);
		r.store = std::move(_store);
		return r;
	}

	RunResult run_sequential(const Program& p, std::span< const Constraint > goals, const SequentialOptions& opts)
	{
		GoalEngine engine(p, opts.policy);
		engine.add_goals(goals);
		Status status = Status::Done;
		std::uint64_t steps = 0;
		while (engine.step())
		{
			++steps;
			if (opts.observer)
				opts.observer(engine.goals(), engine.store(), engine.history(), engine.trace().back());
			if (engine.failed())
			{
				status = Status::Failed;
				break;
			}
			if (opts.max_steps && steps >= opts.max_steps && !engine.goals().empty())
			{
				status = Status::StepLimit;
				break;
			}
		}
		return std::move(engine).finish(status);
	}
}
