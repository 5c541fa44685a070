"""Snake-in-the-box lower bound for best-neighbor policy descent.

Policies with depth-only features over a binary search space of horizon T
are bit-vectors; one-step deviations are Hamming neighbors. A cost
function that decreases monotonically along a longest induced path of the
hypercube (and is maximal elsewhere) forces best-neighbor descent to walk
the whole path, so local optimality can take Theta(2^T) updates.
"""

from ..errors import TooLarge

MAX_DIMENSION = 7
OFF_PATH_COST = 2.0


def neighbors(v, dim):
    return [v ^ (1 << b) for b in range(dim)]


def is_induced_path(path, dim):
    """Every pair of non-consecutive vertices is at Hamming distance >= 2."""
    for i, u in enumerate(path):
        for j in range(i + 1, len(path)):
            d = bin(u ^ path[j]).count("1")
            if j == i + 1:
                if d != 1:
                    return False
            elif d < 2:
                return False
    return True


def longest_snake(dim, canonical=True):
    """Longest induced path in the dim-cube, by depth-first search.

    With `canonical`, the start is fixed at vertex 0 and a new coordinate
    may only be flipped after all lower coordinates have been used
    (valid by hypercube symmetry; prunes heavily). Returns the vertex
    list; length in edges is len(path) - 1.
    """
    if dim > MAX_DIMENSION:
        raise TooLarge(f"dimension {dim} > {MAX_DIMENSION}")
    if dim == 0:
        return [0]
    best = []

    def extend(path, on_path, used_dims):
        nonlocal best
        if len(path) > len(best):
            best = list(path)
        last = path[-1]
        blocked = set()
        for u in path[:-1]:
            for w in neighbors(u, dim):
                blocked.add(w)
        for b in range(dim):
            if canonical and b > used_dims:
                break
            nxt = last ^ (1 << b)
            if nxt in on_path or nxt in blocked:
                continue
            path.append(nxt)
            on_path.add(nxt)
            extend(path, on_path, max(used_dims, b + 1) if canonical else used_dims)
            on_path.remove(nxt)
            path.pop()

    extend([0], {0}, 0)
    return best


def longest_snake_bruteforce(dim):
    """Independent oracle: exhaustive search without the dimension-order
    pruning used by longest_snake.

    Tries every start vertex for dim <= 4; at dim 5 only vertex 0 (valid
    because the hypercube is vertex-transitive).
    """
    if dim > 5:
        raise TooLarge("brute-force oracle limited to dimension 5")
    best = []

    def extend(path, on_path):
        nonlocal best
        if len(path) > len(best):
            best = list(path)
        blocked = set()
        for u in path[:-1]:
            blocked.update(neighbors(u, dim))
        for nxt in neighbors(path[-1], dim):
            if nxt in on_path or nxt in blocked:
                continue
            path.append(nxt)
            on_path.add(nxt)
            extend(path, on_path)
            on_path.remove(nxt)
            path.pop()

    starts = range(1 << dim) if dim <= 4 else (0,)
    for start in starts:
        extend([start], {start})
    return best


def snake_costs(path, dim):
    """Monotone decreasing costs along the path, maximal cost elsewhere."""
    costs = {v: OFF_PATH_COST for v in range(1 << dim)}
    L = len(path)
    for i, v in enumerate(path):
        costs[v] = 1.0 - i / (L + 1)
    return costs


def best_neighbor_descent(costs, start, dim):
    """Greedy policy improvement over one-step deviations."""
    path = [start]
    cur = start
    while True:
        options = [(costs[n], n) for n in neighbors(cur, dim)]
        best_cost, best_v = min(options)
        if best_cost >= costs[cur]:
            return path
        cur = best_v
        path.append(cur)


def snake_lower_bound(dim):
    """Build the adversarial costs and run the descent.

    Returns (traversal as bit strings, update count); the update count
    equals the snake's edge count.
    """
    snake = longest_snake(dim)
    costs = snake_costs(snake, dim)
    traversal = best_neighbor_descent(costs, snake[0], dim)
    assert traversal == snake, "descent left the snake (cost construction bug)"
    bits = [format(v, f"0{dim}b") for v in traversal]
    return bits, len(traversal) - 1
