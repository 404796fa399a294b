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

#ifndef CHR_PITFALLS_HH_
#define CHR_PITFALLS_HH_

#include <chr/goal_engine.hh>

#include <optional>
#include <span>
#include <string_view>

/**
 * @brief Broken execution schemes, kept only as negative controls
 *
 * Each variant is a deterministic simulation of two workers running in
 * lockstep. Goals are dealt to the workers round robin. None of them
 * reaches a final store in general; check_final is expected to reject
 * their results.
 */
namespace chr
{
	enum class Pitfall
	{
		/// Activation does not store the goal; it is stored when dropped.
		StoreOnDrop,
		/// Every worker runs on a private store, merged at the end.
		SplitStore,
		/// Workers take several steps on a private copy before joining.
		MultiStepJoin
	};

	std::optional< Pitfall > pitfall_from_string(std::string_view s);
	const char* to_string(Pitfall p);

	/// Result has an empty trace; the store holds the merged outcome.
	RunResult run_pitfall(Pitfall kind, const Program& p, std::span< const Constraint > goals, unsigned workers = 2);
}

#endif /* CHR_PITFALLS_HH_ */
