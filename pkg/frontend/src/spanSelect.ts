/** Token-range selection over the rendered sentence. */

/** Inclusive token index range; always contiguous. */
export interface TokenRange {
  first: number;
  last: number;
}

export interface SelectionResult {
  range: TokenRange;
  /** True when a non-contiguous attempt was coerced to its bounding range. */
  coerced: boolean;
}

/** Plain click starts a fresh single-token range. */
export function clickToken(index: number): TokenRange {
  return { first: index, last: index };
}

/** Shift-click extends the current range to the bounding range. */
export function shiftClickToken(current: TokenRange | null, index: number): TokenRange {
  if (current === null) {
    return clickToken(index);
  }
  return {
    first: Math.min(current.first, index),
    last: Math.max(current.last, index),
  };
}

/** Drag in either direction normalizes to an ascending range. */
export function dragSelect(anchor: number, head: number): TokenRange {
  return { first: Math.min(anchor, head), last: Math.max(anchor, head) };
}

/**
 * Collapse an arbitrary set of picked token indices to one contiguous range.
 * Gaps are bridged by the bounding range and flagged so the view can warn.
 */
export function coerceSelection(indices: number[]): SelectionResult | null {
  if (indices.length === 0) {
    return null;
  }
  const sorted = [...new Set(indices)].sort((a, b) => a - b);
  const range = { first: sorted[0], last: sorted[sorted.length - 1] };
  const contiguous = sorted.length === range.last - range.first + 1;
  return { range, coerced: !contiguous };
}

export function rangeLength(range: TokenRange): number {
  return range.last - range.first + 1;
}
