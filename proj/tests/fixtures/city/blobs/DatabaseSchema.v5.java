package org.demo.db;

public final class DatabaseSchema {
    public static final int DATABASE_VERSION = 5;
    public static final String ACCOUNTS_TABLE = "accounts";

    static final String CREATE_ACCOUNTS = "CREATE TABLE " + ACCOUNTS_TABLE + " ("
            + "_id INTEGER PRIMARY KEY AUTOINCREMENT, "
            + "uid VARCHAR(255) NOT NULL, "
            + "name VARCHAR(255) NOT NULL, "
            + "currency_code VARCHAR(3)"
            + ")";

    static final String CREATE_TRANSACTIONS = "CREATE TABLE transactions ("
            + "_id INTEGER PRIMARY KEY AUTOINCREMENT, "
            + "uid VARCHAR(255) NOT NULL, "
            + "description TEXT, "
            + "timestamp INTEGER NOT NULL"
            + ")";

    static final String CREATE_SPLITS = "CREATE TABLE splits ("
            + "_id INTEGER PRIMARY KEY AUTOINCREMENT, "
            + "transaction_uid VARCHAR(255) NOT NULL, "
            + "account_uid VARCHAR(255) NOT NULL, "
            + "value INTEGER NOT NULL, "
            + "FOREIGN KEY (transaction_uid) REFERENCES transactions (uid)"
            + ")";

    static final String MIGRATE_3 = "ALTER TABLE transactions ADD COLUMN currency_code VARCHAR(3)";

    // scheduled actions moved to the sync service
    static final String MIGRATE_5 = "DROP TABLE IF EXISTS scheduled_actions";

    private DatabaseSchema() {
    }

    public static int count(String[] statements) {
        int n = 0;
        for (String s : statements) {
            if (s != null) n++;
        }
        return n;
    }
}
