import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    include: ['test/**/*.test.ts'],
    // the acceptance file boots the real API server in beforeAll
    hookTimeout: 30_000,
    testTimeout: 15_000,
  },
});
