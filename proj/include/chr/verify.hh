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

#ifndef CHR_VERIFY_HH_
#define CHR_VERIFY_HH_

#include <chr/abstract.hh>
#include <chr/goal_engine.hh>
#include <chr/trace.hh>

#include <optional>
#include <span>
#include <string>
#include <vector>

/**
 * @brief Checks run on recorded traces
 *
 * The checks only read the serialized trace and re-derive everything else
 * from the program and the initial goals, using the store and the
 * abstract oracle but none of the engines.
 */
namespace chr
{
	struct Verdict
	{
		bool passed = true;
		std::string check;
		/// First counterexample when !passed.
		std::string detail;

		static Verdict ok(std::string check) { return Verdict{true, std::move(check), {}}; }
		static Verdict fail(std::string check, std::string detail) { return Verdict{false, std::move(check), std::move(detail)}; }
	};

	std::string to_string(const Verdict& v);

	/// Un-numbered goals (CHR constraints and equations).
	std::vector< Constraint > no_ids(std::span< const Goal > goals);

	/**
	 * @brief Goal-based state rebuilt step by step from a trace
	 *
	 * apply() checks the preconditions of one step against the current
	 * state and performs it with the recorded ids, rule and substitution.
	 */
	class ReplayState
	{
	public:
		ReplayState(const Program& p, std::span< const Constraint > goals);

		/// Empty on success, else the reason the step is not derivable.
		std::optional< std::string > apply(const TraceStep& step);

		const Store& store() const { return _store; }
		const std::vector< Goal >& goals() const { return _goals; }
		const History& history() const { return _history; }

		/// NoIds(G) ⊎ DropIds(Sn), tags of stored constraints are their ids.
		AbstractStore projection() const;

	private:
		bool take_goal(const Goal& g);

		const Program& _p;
		Store _store;
		std::vector< Goal > _goals;
		History _history;
	};

	/// Replay a trace and compare the final store with the recorded dump.
	Verdict replay(const Trace& t, std::span< const Constraint > goals, const Program& p);

	/// Every step leaves the projection unchanged or is one abstract rewrite step.
	Verdict project_abstract(const Trace& t, std::span< const Constraint > goals, const Program& p);

	/// Goals empty and no rule instance left in the store.
	Verdict check_final(std::span< const Goal > goals, const Store& store, const History& history, const Program& p);
	/// check_final on the state reached by replaying the trace.
	Verdict check_final(const Trace& t, std::span< const Constraint > goals, const Program& p);

	/// Time-overlapping firings have non-overlapping side effects.
	Verdict audit_overlap(const Trace& t);

	/// Every rule head instance in the store has a constraint among the goals.
	Verdict check_active_instances(std::span< const Goal > goals, const Store& store, const History& history, const Program& p);

	/// replay, project_abstract, audit_overlap and, for done runs, check_final.
	std::vector< Verdict > verify_trace(const Trace& t, std::span< const Constraint > goals, const Program& p);
}

#endif /* CHR_VERIFY_HH_ */
