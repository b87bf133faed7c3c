export default {
  test: {
    environment: "happy-dom",
    globalSetup: ["tests/setup-server.ts"],
    testTimeout: 30000,
    hookTimeout: 60000,
  },
};
