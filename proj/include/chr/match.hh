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

#ifndef CHR_MATCH_HH_
#define CHR_MATCH_HH_

#include <chr/store.hh>
#include <chr/syntax.hh>

#include <functional>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace chr
{
	/// Propagation history: (rule index, sorted head ids).
	using History = std::set< std::pair< std::size_t, std::vector< Id > > >;

	std::vector< Id > history_key(std::vector< Id > ids);

	/// A complete, guard-checked match found for an active constraint.
	struct Firing
	{
		std::size_t rule;
		/// Head index of the active constraint.
		std::size_t active_head;
		Role role;
		/// Matched ids in rule head order (propagated heads first).
		std::vector< Id > heads;
		Substitution phi;

		std::vector< Id > propagated_ids(const Rule& r) const;
		std::vector< Id > simplified_ids(const Rule& r) const;
	};

	/**
	 * @brief Look for the first rule instance the constraint #active can fire
	 *
	 * Occurrences are tried top-to-bottom, partners in ascending id along
	 * the compiled join plan, guard conjuncts as soon as they are ground.
	 * For occurrences in a kept head, instances for which @p fired returns
	 * true are skipped.
	 */
	std::optional< Firing > find_firing(const Program& p, const Store& s, Id active,
		const std::function< bool(std::size_t rule, const std::vector< Id >& key) >& fired);

	/// Body goals φ(B) with ground arithmetic evaluated.
	std::vector< Constraint > instantiate_body(const Rule& r, const Substitution& phi);
}

#endif /* CHR_MATCH_HH_ */
