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

#include <chr/concurrent.hh>

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <deque>
#include <latch>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <thread>

namespace chr
{
	namespace
	{
		class Engine
		{
		public:
			Engine(const Program& p, const EngineConfig& cfg)
				: _p(p), _cfg(cfg)
			{ }

			void seed_goals(std::span< const Constraint > goals)
			{
				for (const auto& g : goals)
					_pool.push_back(Goal{g, 0});
			}

			RunResult run()
			{
				unsigned n = std::max(1u, _cfg.workers);
				if (n == 1)
					work(0);
				else
				{
					std::latch start(n);
					std::vector< std::thread > threads;
					threads.reserve(n);
					for (unsigned w = 0; w < n; ++w)
						threads.emplace_back([this, w, &start] {
							start.arrive_and_wait();
							work(w);
						});
					for (auto& t : threads)
						t.join();
				}

				RunResult r;
				std::sort(_trace.begin(), _trace.end(), [](const TraceStep& a, const TraceStep& b) { return a.seq < b.seq; });
				r.goals.assign(_pool.begin(), _pool.end());
				if (_failed)
					r.status = Status::Failed;
				else if (!r.goals.empty())
					r.status = Status::StepLimit;
				else
					r.status = Status::Done;
				r.trace.engine = "concurrent";
				r.trace.workers = n;
				r.trace.seed = _cfg.seed;
				r.trace.steps = std::move(_trace);
				r.trace.status = r.status;
				r.trace.final_store = _store.dump();
				r.history = std::move(_history);
				r.store = std::move(_store);
				return r;
			}

		private:
			struct Worker
			{
				unsigned index;
				std::mt19937_64 rng;
				bool jitter;
			};

			void work(unsigned index)
			{
				Worker w{index, std::mt19937_64(_cfg.seed * 0x9e3779b97f4a7c15ULL + index + 1), _cfg.workers > 1};
				std::optional< Goal > active;
				while (!_stop.load())
				{
					if (!active)
					{
						active = take(w);
						if (!active) break;
					}
					Goal g = std::move(*active);
					active.reset();
					if (!g.numbered())
					{
						if (const auto* e = std::get_if< Equation >(&g.constraint))
							solve(w, *e);
						else
							active = activate(w, std::get< Chr >(g.constraint));
					}
					else
						active = execute(w, g);

					std::uint64_t done = ++_steps;
					if (_cfg.max_steps && done >= _cfg.max_steps)
						halt();
				}
				if (active)
				{
					std::lock_guard l(_pool_mx);
					_pool.push_front(std::move(*active));
				}
			}

			void halt()
			{
				_stop.store(true);
				std::lock_guard l(_pool_mx);
				_pool_cv.notify_all();
			}

			std::optional< Goal > take(Worker& w)
			{
				std::unique_lock l(_pool_mx);
				unsigned n = std::max(1u, _cfg.workers);
				for (;;)
				{
					if (_stop.load() || _finished) return std::nullopt;
					if (!_pool.empty())
					{
						std::size_t k = 0;
						if (w.jitter)
						{
							std::size_t window = std::min< std::size_t >(_pool.size(), 4);
							k = std::uniform_int_distribution< std::size_t >(0, window - 1)(w.rng);
						}
						Goal g = std::move(_pool[k]);
						_pool.erase(_pool.begin() + static_cast< std::ptrdiff_t >(k));
						return g;
					}
					if (++_idle == n)
					{
						_finished = true;
						_pool_cv.notify_all();
						return std::nullopt;
					}
					_pool_cv.wait(l);
					--_idle;
				}
			}

			// Caller holds the exclusive store lock.
			void publish(std::vector< Goal > gs)
			{
				if (gs.empty()) return;
				std::lock_guard l(_pool_mx);
				for (auto& g : gs)
					_pool.push_back(std::move(g));
				_pool_cv.notify_all();
			}

			void record(TraceStep t)
			{
				std::lock_guard l(_trace_mx);
				_trace.push_back(std::move(t));
			}

			void maybe_yield(Worker& w)
			{
				if (!w.jitter) return;
				int n = std::uniform_int_distribution< int >(0, 3)(w.rng);
				for (int i = 0; i < n; ++i)
					std::this_thread::yield();
			}

			void solve(Worker& w, const Equation& e)
			{
				TraceStep t;
				t.kind = StepKind::Solve;
				t.goal = e;
				t.worker = static_cast< int >(w.index);
				t.start = ++_tick;
				maybe_yield(w);
				std::unique_lock ex(_store_mx);
				t.commit = ++_tick;
				auto solved = _store.add_equation(e);
				for (Id id : solved.woken)
					_store.entry(id).touched = t.commit;
				t.seq = ++_seq;
				t.propagated = solved.woken;
				std::vector< Goal > woken;
				for (Id id : solved.woken)
					woken.push_back(Goal{_store.get(id), id});
				record(std::move(t));
				if (!solved.consistent)
				{
					_failed = true;
					halt();
					return;
				}
				publish(std::move(woken));
			}

			std::optional< Goal > activate(Worker& w, const Chr& c)
			{
				TraceStep t;
				t.kind = StepKind::Activate;
				t.goal = c;
				t.worker = static_cast< int >(w.index);
				t.start = ++_tick;
				maybe_yield(w);
				std::unique_lock ex(_store_mx);
				t.commit = ++_tick;
				Id id = _store.insert(c);
				t.id = id;
				t.seq = ++_seq;
				Goal g{_store.get(id), id};
				record(std::move(t));
				return g;
			}

			std::optional< Goal > execute(Worker& w, const Goal& g)
			{
				auto fired = [this](std::size_t rule, const std::vector< Id >& key) {
					return _history.count({rule, key}) > 0;
				};
				for (;;)
				{
					TraceStep t;
					t.id = g.id;
					t.worker = static_cast< int >(w.index);
					std::optional< Firing > f;
					{
						std::shared_lock sh(_store_mx);
						t.start = ++_tick;
						if (_store.alive(g.id))
							f = find_firing(_p, _store, g.id, fired);
						if (!f)
						{
							// Linearized while the shared lock excludes every commit.
							t.kind = StepKind::Drop;
							t.commit = ++_tick;
							t.seq = ++_seq;
							record(std::move(t));
							return std::nullopt;
						}
					}
					maybe_yield(w);

					const Rule& r = _p.rules[f->rule];
					auto kept = f->propagated_ids(r);
					auto removed = f->simplified_ids(r);

					std::unique_lock ex(_store_mx);
					bool valid = std::all_of(f->heads.begin(), f->heads.end(), [this](Id id) { return _store.alive(id); });
					valid = valid && std::all_of(removed.begin(), removed.end(), [this, &t](Id id) {
						return _store.entry(id).touched <= t.start;
					});
					if (valid && f->role == Role::Propagated)
						valid = !fired(f->rule, history_key(f->heads));
					if (!valid)
					{
						++_aborts;
						continue;
					}

					t.commit = ++_tick;
					_store.kill(removed);
					for (Id id : kept)
						_store.entry(id).touched = t.commit;
					if (f->role == Role::Propagated)
						_history.insert({f->rule, history_key(f->heads)});
					t.seq = ++_seq;
					t.kind = f->role == Role::Simplified ? StepKind::Simplify : StepKind::Propagate;
					t.rule = r.name;
					t.propagated = history_key(kept);
					t.simplified = history_key(removed);
					t.heads = f->heads;
					t.phi = f->phi;
					record(std::move(t));

					std::vector< Goal > body;
					for (auto& b : instantiate_body(r, f->phi))
						body.push_back(Goal{std::move(b), 0});
					publish(std::move(body));
					if (f->role == Role::Propagated)
						return Goal{_store.get(g.id), g.id};
					return std::nullopt;
				}
			}

			const Program& _p;
			EngineConfig _cfg;

			std::shared_mutex _store_mx;
			Store _store;
			History _history;

			std::mutex _pool_mx;
			std::condition_variable _pool_cv;
			std::deque< Goal > _pool;
			unsigned _idle = 0;
			bool _finished = false;

			std::mutex _trace_mx;
			std::vector< TraceStep > _trace;

			std::atomic< std::uint64_t > _tick{0};
			std::atomic< std::uint64_t > _seq{0};
			std::atomic< std::uint64_t > _steps{0};
			std::atomic< std::uint64_t > _aborts{0};
			std::atomic< bool > _stop{false};
			std::atomic< bool > _failed{false};
		};
	}

	RunResult run_concurrent(const Program& p, std::span< const Constraint > goals, const EngineConfig& cfg)
	{
		Engine e(p, cfg);
		e.seed_goals(goals);
		return e.run();
	}

	bool intervals_overlap(const TraceStep& a, const TraceStep& b)
	{
		if (a.worker < 0 || b.worker < 0) return false;
		return a.start < b.commit && b.start < a.commit;
	}

	namespace
	{
		bool meets(const std::vector< Id >& a, const std::vector< Id >& b)
		{
			for (Id x : a)
				if (std::find(b.begin(), b.end(), x) != b.end()) return true;
			return false;
		}
	}

	bool non_overlapping(const TraceStep& a, const TraceStep& b)
	{
		return !meets(a.simplified, b.propagated) && !meets(a.simplified, b.simplified)
			&& !meets(b.simplified, a.propagated);
	}

	Decomposition decompose_k(std::span< const TraceStep > steps)
	{
		Decomposition d;
		std::vector< const TraceStep* > order;
		for (const auto& s : steps)
			order.push_back(&s);
		std::sort(order.begin(), order.end(), [](const TraceStep* a, const TraceStep* b) {
			return a->start != b->start ? a->start < b->start : a->seq < b->seq;
		});

		std::vector< const TraceStep* > group;
		std::uint64_t reach = 0;
		auto close = [&] {
			if (group.empty()) return;
			OverlapGroup g;
			for (const auto* s : group)
				g.seqs.push_back(s->seq);
			std::sort(g.seqs.begin(), g.seqs.end());
			d.groups.push_back(std::move(g));
			group.clear();
		};
		for (const auto* s : order)
		{
			bool timed = s->worker >= 0;
			if (!timed || group.empty() || s->start >= reach)
			{
				close();
				reach = 0;
			}
			group.push_back(s);
			reach = timed ? std::max(reach, s->commit) : 0;
			if (!timed) close();
		}
		close();

		// Only pairs whose intervals intersect have to commute.
		for (std::size_t i = 0; i < order.size() && d.ok; ++i)
		{
			const TraceStep* a = order[i];
			if (a->worker < 0) continue;
			for (std::size_t j = i + 1; j < order.size() && order[j]->start < a->commit; ++j)
			{
				const TraceStep* b = order[j];
				if (!intervals_overlap(*a, *b) || non_overlapping(*a, *b)) continue;
				d.ok = false;
				d.first = std::min(a->seq, b->seq);
				d.second = std::max(a->seq, b->seq);
				d.detail = "steps " + std::to_string(d.first) + " and " + std::to_string(d.second)
					+ " overlap in time and in their side effects";
				break;
			}
		}
		return d;
	}
}
