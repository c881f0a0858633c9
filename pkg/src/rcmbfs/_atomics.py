"""Lock-free atomic read-modify-write primitives for use inside nogil kernels.

Numba has no portable CPU atomics, so these are built directly on LLVM's
``atomicrmw`` instruction via the intrinsic extension API.  Monotonic ordering
is sufficient here: the kernels only need atomicity of each individual update,
and level-synchronous barriers (thread joins) provide the cross-level
happens-before edges.
"""

from numba import types
from numba.core import cgutils
from numba.extending import intrinsic

__all__ = ["atomic_fetch_or_u64", "atomic_fetch_add_i64"]


@intrinsic
def atomic_fetch_or_u64(typingctx, arr_t, idx_t, val_t):
    """``old = arr[idx]; arr[idx] |= val; return old`` as one atomic op.

    ``arr`` must be a 1-d contiguous uint64 array.  The returned previous
    value lets the caller detect whether it set a bit first (claim semantics).
    """
    if not isinstance(arr_t, types.Array) or arr_t.dtype != types.uint64:
        raise TypeError("arr must be a uint64 array")

    sig = types.uint64(arr_t, types.intp, types.uint64)

    def codegen(context, builder, signature, args):
        arr, idx, val = args
        ary = context.make_array(signature.args[0])(context, builder, arr)
        ptr = cgutils.get_item_pointer(
            context, builder, signature.args[0], ary, [idx], wraparound=False
        )
        return builder.atomic_rmw("or", ptr, val, ordering="monotonic")

    return sig, codegen


@intrinsic
def atomic_fetch_add_i64(typingctx, arr_t, idx_t, val_t):
    """``old = arr[idx]; arr[idx] += val; return old`` as one atomic op.

    ``arr`` must be a 1-d contiguous int64 array.  Used for the shared
    partition cursor and for concurrent counters.
    """
    if not isinstance(arr_t, types.Array) or arr_t.dtype != types.int64:
        raise TypeError("arr must be an int64 array")

    sig = types.int64(arr_t, types.intp, types.int64)

    def codegen(context, builder, signature, args):
        arr, idx, val = args
        ary = context.make_array(signature.args[0])(context, builder, arr)
        ptr = cgutils.get_item_pointer(
            context, builder, signature.args[0], ary, [idx], wraparound=False
        )
        return builder.atomic_rmw("add", ptr, val, ordering="monotonic")

    return sig, codegen
