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

#ifndef CHR_CONCURRENT_HH_
#define CHR_CONCURRENT_HH_

#include <chr/goal_engine.hh>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace chr
{
	struct EngineConfig
	{
		unsigned workers = 1;
		/// Perturbs goal selection and yields when workers > 1.
		std::uint64_t seed = 0;
		/// 0 means no bound.
		std::uint64_t max_steps = 0;
	};

	/**
	 * @brief Run n workers against one shared store
	 *
	 * Each worker owns at most one active goal and performs one derivation
	 * step at a time. Partner search runs under a shared lock; a firing
	 * commits under the exclusive lock after checking that all its heads
	 * are still alive and that no simplified head has been read as a kept
	 * head or woken since the search started. A failed check restarts the
	 * search. Activate and Solve take the exclusive lock.
	 *
	 * Every step carries its worker and the tick interval [search start,
	 * commit]; seq is the commit order.
	 */
	RunResult run_concurrent(const Program& p, std::span< const Constraint > goals, const EngineConfig& cfg);

	struct OverlapGroup
	{
		/// Seq numbers of firings whose intervals overlap transitively.
		std::vector< std::uint64_t > seqs;
	};

	struct Decomposition
	{
		bool ok = true;
		std::vector< OverlapGroup > groups;
		/// Offending pair when !ok.
		std::uint64_t first = 0;
		std::uint64_t second = 0;
		std::string detail;
	};

	/**
	 * @brief Split a commit trace into groups of time-overlapping steps
	 *
	 * Every pair inside a group must have non-overlapping side effects:
	 * neither simplifies a constraint the other keeps or simplifies. Steps
	 * without worker information are treated as instantaneous.
	 */
	Decomposition decompose_k(std::span< const TraceStep > steps);

	/// Two steps overlap in time when their tick intervals intersect.
	bool intervals_overlap(const TraceStep& a, const TraceStep& b);
	/// Definition of non-overlapping side effects for one pair.
	bool non_overlapping(const TraceStep& a, const TraceStep& b);
}

#endif /* CHR_CONCURRENT_HH_ */
