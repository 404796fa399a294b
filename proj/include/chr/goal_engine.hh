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

#ifndef CHR_GOAL_ENGINE_HH_
#define CHR_GOAL_ENGINE_HH_

#include <chr/match.hh>
#include <chr/store.hh>
#include <chr/syntax.hh>
#include <chr/trace.hh>

#include <deque>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace chr
{
	/// A goal: an un-numbered constraint or a numbered one (id != 0).
	struct Goal
	{
		Constraint constraint;
		Id id = 0;

		bool numbered() const { return id != 0; }
		bool operator==(const Goal&) const = default;
	};

	std::string to_string(const Goal& g);

	enum class Policy
	{
		Fifo, Lifo
	};

	struct RunResult
	{
		Store store;
		/// Goals left over (empty when status is done).
		std::vector< Goal > goals;
		Trace trace;
		Status status = Status::Done;
		History history;
	};

	struct SequentialOptions
	{
		Policy policy = Policy::Fifo;
		/// 0 means no bound.
		std::uint64_t max_steps = 0;
		/// Called after every step with the goals and the store. Used to
		/// check invariants such as the active-instance property.
		std::function< void(const std::deque< Goal >&, const Store&, const History&, const TraceStep&) > observer;
	};

	/**
	 * @brief Sequential goal-based interpreter
	 *
	 * The goal at the front of the queue is executed. Under fifo, the
	 * continuation of a step (c#i after Activate, the goal after Propagate)
	 * stays at the front and new body and woken goals join at the back;
	 * under lifo all new goals go to the front.
	 */
	class GoalEngine
	{
	public:
		GoalEngine(const Program& p, Policy policy);

		void add_goals(std::span< const Constraint > goals);

		/// Perform one derivation step. False when there are no goals left.
		bool step();

		const std::deque< Goal >& goals() const { return _goals; }
		const Store& store() const { return _store; }
		const History& history() const { return _history; }
		const std::vector< TraceStep >& trace() const { return _trace; }
		bool failed() const { return _store.inconsistent(); }

		RunResult finish(Status status) &&;

	private:
		void push_new(std::vector< Goal > gs);
		void step_solve(const Equation& e);
		void step_activate(const Chr& c);
		void execute_goal(Id id);

		const Program& _p;
		Policy _policy;
		Store _store;
		std::deque< Goal > _goals;
		History _history;
		std::vector< TraceStep > _trace;
	};

	RunResult run_sequential(const Program& p, std::span< const Constraint > goals, const SequentialOptions& opts = {});
}

#endif /* CHR_GOAL_ENGINE_HH_ */
