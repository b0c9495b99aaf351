/**
 * Sequence-number guard for in-flight requests. Each request takes a token;
 * a response is applied only if its token is still the newest one issued.
 */
export interface RequestGate {
  next: () => number;
  isLatest: (token: number) => boolean;
  invalidate: () => void;
}

export function createRequestGate(): RequestGate {
  let current = 0;

  return {
    next() {
      current += 1;
      return current;
    },
    isLatest(token: number) {
      return token === current;
    },
    invalidate() {
      current += 1;
    },
  };
}
