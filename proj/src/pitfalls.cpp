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

#include <chr/pitfalls.hh>

#include <deque>

namespace chr
{
	std::optional< Pitfall > pitfall_from_string(std::string_view s)
	{
		for (Pitfall p : {Pitfall::StoreOnDrop, Pitfall::SplitStore, Pitfall::MultiStepJoin})
			if (s == to_string(p)) return p;
		return std::nullopt;
	}

	const char* to_string(Pitfall p)
	{
		switch (p)
		{
			case Pitfall::StoreOnDrop: return "store-on-drop";
			case Pitfall::SplitStore: return "split-store";
			case Pitfall::MultiStepJoin: return "multi-step";
		}
		return "?";
	}

	namespace
	{
		struct Lane
		{
			std::deque< Goal > goals;
			Store view;
			std::vector< Id > inserted;
			std::vector< Id > killed;
			std::vector< Equation > eqs;
		};

		auto fired_in(const History& h)
		{
			return [&h](std::size_t rule, const std::vector< Id >& key) { return h.count({rule, key}) > 0; };
		}

		void enqueue_body(Lane& l, const Rule& r, const Firing& f)
		{
			for (auto& b : instantiate_body(r, f.phi))
				l.goals.push_back(Goal{std::move(b), 0});
		}

		// One ordinary goal-based step on the lane's private store.
		void private_step(const Program& p, Lane& l, Id& next_id, History& h)
		{
			Goal g = std::move(l.goals.front());
			l.goals.pop_front();
			if (!g.numbered())
			{
				if (const auto* e = std::get_if< Equation >(&g.constraint))
				{
					auto solved = l.view.add_equation(*e);
					l.eqs.push_back(*e);
					for (Id id : solved.woken)
						l.goals.push_back(Goal{l.view.get(id), id});
					return;
				}
				Id id = next_id++;
				l.view.insert_with_id(std::get< Chr >(g.constraint), id);
				l.inserted.push_back(id);
				l.goals.push_front(Goal{l.view.get(id), id});
				return;
			}
			auto f = find_firing(p, l.view, g.id, fired_in(h));
			if (!f) return;
			const Rule& r = p.rules[f->rule];
			auto removed = f->simplified_ids(r);
			l.view.kill(removed);
			l.killed.insert(l.killed.end(), removed.begin(), removed.end());
			if (f->role == Role::Propagated)
				h.insert({f->rule, history_key(f->heads)});
			enqueue_body(l, r, *f);
			if (f->role == Role::Propagated)
				l.goals.push_front(g);
		}

		void merge(Store& shared, Lane& l)
		{
			for (Id id : l.inserted)
				if (l.view.alive(id) && !shared.known(id))
					shared.insert_with_id(l.view.get(id), id);
			for (Id id : l.killed)
				if (shared.alive(id))
				{
					Id one[] = {id};
					shared.kill(one);
				}
			for (const auto& e : l.eqs)
				shared.add_equation(e);
			l.inserted.clear();
			l.killed.clear();
			l.eqs.clear();
		}

		bool busy(const std::vector< Lane >& lanes)
		{
			for (const auto& l : lanes)
				if (!l.goals.empty()) return true;
			return false;
		}

		// Private stores joined every `period` lockstep rounds (0: only at the end).
		Store run_private(const Program& p, std::vector< Lane >& lanes, std::size_t period, History& h)
		{
			Store shared;
			Id next_id = 1;
			std::size_t round = 0;
			while (busy(lanes))
			{
				for (auto& l : lanes)
					if (!l.goals.empty())
						private_step(p, l, next_id, h);
				++round;
				if (period && round % period == 0)
				{
					for (auto& l : lanes)
						merge(shared, l);
					for (auto& l : lanes)
						l.view = shared;
				}
			}
			for (auto& l : lanes)
				merge(shared, l);
			return shared;
		}

		// Activation only numbers the goal; the stored copy appears on Drop.
		Store run_store_on_drop(const Program& p, std::vector< Lane >& lanes, History& h)
		{
			Store shared;
			Id next_id = 1;
			while (busy(lanes))
			{
				const Store snapshot = shared;
				struct Effect
				{
					std::optional< NumberedConstraint > store;
					std::vector< Id > kill;
				};
				std::vector< Effect > effects(lanes.size());
				for (std::size_t w = 0; w < lanes.size(); ++w)
				{
					Lane& l = lanes[w];
					if (l.goals.empty()) continue;
					Goal g = std::move(l.goals.front());
					l.goals.pop_front();
					if (!g.numbered())
					{
						if (const auto* e = std::get_if< Equation >(&g.constraint))
						{
							auto solved = shared.add_equation(*e);
							for (Id id : solved.woken)
								l.goals.push_back(Goal{shared.get(id), id});
						}
						else
							l.goals.push_front(Goal{g.constraint, next_id++});
						continue;
					}
					Store view = snapshot;
					if (!view.known(g.id))
						view.insert_with_id(std::get< Chr >(g.constraint), g.id);
					auto f = find_firing(p, view, g.id, fired_in(h));
					if (!f)
					{
						if (!shared.known(g.id))
							effects[w].store = NumberedConstraint{std::get< Chr >(g.constraint), g.id};
						continue;
					}
					const Rule& r = p.rules[f->rule];
					for (Id id : f->simplified_ids(r))
						if (id != g.id || snapshot.known(id))
							effects[w].kill.push_back(id);
					if (f->role == Role::Propagated)
					{
						h.insert({f->rule, history_key(f->heads)});
						l.goals.push_front(g);
					}
					enqueue_body(l, r, *f);
				}
				for (auto& e : effects)
				{
					if (e.store) shared.insert_with_id(e.store->constraint, e.store->id);
					for (Id id : e.kill)
						if (shared.alive(id))
						{
							Id one[] = {id};
							shared.kill(one);
						}
				}
			}
			return shared;
		}
	}

	RunResult run_pitfall(Pitfall kind, const Program& p, std::span< const Constraint > goals, unsigned workers)
	{
		std::vector< Lane > lanes(std::max(1u, workers));
		for (std::size_t i = 0; i < goals.size(); ++i)
			lanes[i % lanes.size()].goals.push_back(Goal{goals[i], 0});

		RunResult r;
		switch (kind)
		{
			case Pitfall::StoreOnDrop: r.store = run_store_on_drop(p, lanes, r.history); break;
			case Pitfall::SplitStore: r.store = run_private(p, lanes, 0, r.history); break;
			case Pitfall::MultiStepJoin: r.store = run_private(p, lanes, 2, r.history); break;
		}
		r.status = r.store.inconsistent() ? Status::Failed : Status::Done;
		r.trace.engine = std::string("pitfall-") + to_string(kind);
		r.trace.workers = static_cast< unsigned >(lanes.size());
		r.trace.status = r.status;
		r.trace.final_store = r.store.dump();
		return r;
	}
}
