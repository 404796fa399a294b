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

#include <chr/match.hh>

#include <algorithm>

namespace chr
{
	std::vector< Id > history_key(std::vector< Id > ids)
	{
		std::sort(ids.begin(), ids.end());
		return ids;
	}

	std::vector< Id > Firing::propagated_ids(const Rule& r) const
	{
		return {heads.begin(), heads.begin() + static_cast< std::ptrdiff_t >(r.propagated.size())};
	}

	std::vector< Id > Firing::simplified_ids(const Rule& r) const
	{
		return {heads.begin() + static_cast< std::ptrdiff_t >(r.propagated.size()), heads.end()};
	}

	namespace
	{
		struct Search
		{
			const Program& p;
			const Store& s;
			const std::function< bool(std::size_t, const std::vector< Id >&) >& fired;
			const Occurrence* occ = nullptr;
			const Rule* rule = nullptr;
			std::vector< Id > heads;

			bool used(Id id) const
			{
				return std::find(heads.begin(), heads.end(), id) != heads.end();
			}

			// Depth-first walk of the join plan; phi is extended along the way.
			bool run(std::size_t step, Substitution& phi)
			{
				if (step == occ->plan.size())
				{
					if (occ->role == Role::Propagated && fired(occ->rule, history_key(heads)))
						return false;
					return true;
				}
				const JoinStep& js = occ->plan[step];
				if (js.kind == JoinStep::Kind::Guard)
				{
					if (!entails_solved(s.theta(), phi, p.guard_conjuncts[occ->rule][js.index]))
						return false;
					return run(step + 1, phi);
				}
				const Chr& pattern = rule->head(js.index);
				for (Id id : s.candidates(pattern, phi))
				{
					if (used(id)) continue;
					auto ext = match(pattern, s.get(id), phi);
					if (!ext) continue;
					heads[js.index] = id;
					if (run(step + 1, *ext))
					{
						phi = std::move(*ext);
						return true;
					}
					heads[js.index] = 0;
				}
				return false;
			}
		};
	}

	std::optional< Firing > find_firing(const Program& p, const Store& s, Id active,
		const std::function< bool(std::size_t rule, const std::vector< Id >& key) >& fired)
	{
		if (!s.alive(active)) return std::nullopt;
		const Chr& c = s.get(active);
		Search search{p, s, fired, nullptr, nullptr, {}};
		for (const auto& occ : p.occurrences_of(c.pred))
		{
			const Rule& r = p.rules[occ.rule];
			auto phi = match(r.head(occ.head), c, Substitution{});
			if (!phi) continue;
			search.occ = &occ;
			search.rule = &r;
			search.heads.assign(r.head_count(), 0);
			search.heads[occ.head] = active;
			if (search.run(0, *phi))
				return Firing{occ.rule, occ.head, occ.role, search.heads, std::move(*phi)};
		}
		return std::nullopt;
	}

	std::vector< Constraint > instantiate_body(const Rule& r, const Substitution& phi)
	{
		std::vector< Constraint > out;
		out.reserve(r.body.size());
		for (const auto& b : r.body)
			out.push_back(simplify_ground(apply(phi, b)));
		return out;
	}
}
